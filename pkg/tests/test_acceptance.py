"""Release gate: the seven go/no-go checks, one test and one line each.

Run with -v to get the per-criterion pass/fail lines. Tolerances are stated
inline next to each assertion; nothing here is loosened for convenience.
"""

import json
import random
import time

import numpy as np
import pytest

from sherdkit.assembly import Side, commit, init_assembly
from sherdkit.cli import main
from sherdkit.extraction import profile_from_mesh
from sherdkit.fixtures import FIXTURE_IDS, fixture_profile
from sherdkit.matching import MatchConfig, best_matches
from sherdkit.profile import ThicknessProfile

from oracles import oracle_best_matches
from vessels import pl_thickness, sine_sherds, sine_vessel_spec, STAGGERED_CUTS


def angle_between(u, v) -> float:
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    return float(np.arccos(np.clip(np.dot(u, v), -1.0, 1.0)))


def auto_assemble(profiles, cfg=MatchConfig()):
    """The harness side-feeder: best acceptable candidate, always RIGHT."""
    state = init_assembly(profiles, cfg)
    while True:
        top = next((c for c in state.candidates if c.accepted), None)
        if top is None:
            return state
        state = commit(state, top.sherd_id, Side.RIGHT)


@pytest.fixture(scope="module")
def pipeline_run():
    """Seed-42 end-to-end run, timed from mesh synthesis to final commit."""
    t0 = time.perf_counter()
    pieces = sine_sherds(42)
    per_sherd = []
    for sherd, gt in pieces:
        true_dir = np.asarray(gt.rotation)[:, 2]
        axis, plane, prof = profile_from_mesh(sherd, orient=true_dir)
        per_sherd.append((gt, axis, prof))
    state = auto_assemble([prof for _, _, prof in per_sherd])
    elapsed = time.perf_counter() - t0
    return {"per_sherd": per_sherd, "state": state, "elapsed": elapsed}


def test_fixture_integrity():
    """Embedded profiles: reference counts and spot values, exact."""
    counts = {sid: len(fixture_profile(sid)) for sid in FIXTURE_IDS}
    assert counts == {"A4": 61, "A5": 57, "B10": 36, "C2": 17, "C15": 15}
    assert fixture_profile("A5").samples[0] == 5.94
    assert fixture_profile("A4").samples[60] == 7.62
    assert fixture_profile("C15").samples[0] == 5.26
    print("PASS fixture integrity")


def test_oracle_equivalence():
    """Rank-1 of best_matches equals the exhaustive oracle exactly, on every
    ordered fixture pair and on 1000 random pairs of length <= 64."""
    cfg = MatchConfig()

    def check(a: ThicknessProfile, b: ThicknessProfile):
        got = best_matches(a, b, cfg)[0]
        offset, overlap, sad, _, _ = oracle_best_matches(
            list(a.samples), list(b.samples), cfg.min_overlap, cfg.top_k
        )[0]
        assert (got.offset, got.overlap, got.sad) == (offset, overlap, sad)

    for ia in FIXTURE_IDS:
        for ib in FIXTURE_IDS:
            if ia != ib:
                check(fixture_profile(ia), fixture_profile(ib))

    rng = random.Random(64)
    for _ in range(1000):
        a = [rng.uniform(3.0, 9.0) for _ in range(rng.randint(8, 64))]
        b = [rng.uniform(3.0, 9.0) for _ in range(rng.randint(8, 64))]
        check(
            ThicknessProfile(np.array(a), step=1.0, sherd_id="a"),
            ThicknessProfile(np.array(b), step=1.0, sherd_id="b"),
        )
    print("PASS oracle equivalence (20 fixture pairs + 1000 random)")


def test_self_match():
    """Every fixture against itself: offset 0, score 0, full overlap."""
    for sid in FIXTURE_IDS:
        p = fixture_profile(sid)
        m = best_matches(p, p, MatchConfig())[0]
        assert m.offset == 0
        assert m.score == 0.0
        assert m.overlap == len(p)
    print("PASS self-match")


def test_synthetic_end_to_end(pipeline_run):
    """Sine-walled vessel, 6 re-posed sherds: axis < 1e-3 rad, profile MAE
    < 0.05 mm, every committed offset within +-1 sample, under 30 s."""
    state = pipeline_run["state"]
    assert state.complete

    for gt, axis, prof in pipeline_run["per_sherd"]:
        true_dir = np.asarray(gt.rotation)[:, 2]
        assert angle_between(axis.direction, true_dir) < 1e-3, gt.zone_label
        h0 = gt.height_interval[0]
        target = pl_thickness(h0 + np.arange(len(prof)) * prof.step)
        mae = float(np.mean(np.abs(prof.samples - target)))
        assert mae < 0.05, (gt.zone_label, mae)

    placed = {m.sherd_id: m.offset for m in state.meta.members}
    for gt, _, _ in pipeline_run["per_sherd"]:
        true_offset = int(gt.height_interval[0])
        assert abs(placed[gt.zone_label] - true_offset) <= 1, gt.zone_label

    assert pipeline_run["elapsed"] < 30.0
    print(f"PASS synthetic end-to-end ({pipeline_run['elapsed']:.1f}s)")


def test_missing_sherd_robustness(pipeline_run):
    """Drop one interior sherd; the rest still land on their true offsets."""
    profiles = [
        prof for _, _, prof in pipeline_run["per_sherd"] if prof.sherd_id != "E0"
    ]
    state = auto_assemble(profiles)
    assert state.complete
    placed = {m.sherd_id: m.offset for m in state.meta.members}
    full = {m.sherd_id: m.offset for m in pipeline_run["state"].meta.members}
    assert placed == {sid: off for sid, off in full.items() if sid != "E0"}
    print("PASS missing-sherd robustness")


def test_determinism(tmp_path):
    """Two seed-42 pipeline runs, mesh to layout, byte-identical output."""
    spec_path = tmp_path / "vessel.json"
    spec_path.write_text(json.dumps(sine_vessel_spec().to_dict()))
    cuts_path = tmp_path / "cuts.json"
    cuts_path.write_text(json.dumps(STAGGERED_CUTS.to_dict()))

    layouts = []
    for run in ("one", "two"):
        root = tmp_path / run
        root.mkdir()
        mesh_path = root / "vessel.ply"
        assert main(["synth", "--spec", str(spec_path), "--out", str(mesh_path)]) == 0
        sherd_dir = root / "sherds"
        assert main([
            "fragment", "--mesh", str(mesh_path), "--cuts", str(cuts_path),
            "--seed", "42", "--out-dir", str(sherd_dir),
        ]) == 0
        profile_dir = root / "profiles"
        profile_dir.mkdir()
        for gt_path in sorted(sherd_dir.glob("*.gt.json")):
            label = gt_path.name.removesuffix(".gt.json")
            hint = [row[2] for row in json.loads(gt_path.read_text())["rotation"]]
            assert main([
                "extract", "--mesh", str(sherd_dir / f"{label}.ply"),
                "--orient=" + ",".join(repr(x) for x in hint),
                "--out", str(profile_dir / f"{label}.tp.json"),
            ]) == 0
        layout_path = root / "layout.json"
        assert main([
            "assemble", "--profiles", str(profile_dir), "--auto",
            "--out", str(layout_path),
        ]) == 0
        layouts.append(layout_path.read_bytes())

    assert layouts[0] == layouts[1]
    print("PASS determinism (byte-identical layouts)")


def test_performance():
    """All 4950 pairings of 100 random profiles (length <= 200) in < 1 s."""
    rng = random.Random(200)
    profiles = [
        ThicknessProfile(
            np.array([rng.uniform(3.0, 9.0) for _ in range(rng.randint(20, 200))]),
            step=1.0,
            sherd_id=f"S{i}",
        )
        for i in range(100)
    ]
    cfg = MatchConfig()
    t0 = time.perf_counter()
    for i in range(100):
        for j in range(i + 1, 100):
            best_matches(profiles[i], profiles[j], cfg)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, elapsed
    print(f"PASS performance (4950 pairs in {elapsed * 1000:.0f} ms)")
