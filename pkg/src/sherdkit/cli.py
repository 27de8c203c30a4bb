"""Command-line entry point tying the pipeline stages together.

Subcommands: synth, fragment, extract, match, assemble, serve, fixtures,
report. Exit codes: 0 success, 1 domain error (JSON on stderr with --json),
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .assembly import Side, commit, export_layout, init_assembly, layout_dict, strip_order, undo
from .errors import SherdKitError
from .fixtures import write_fixture_files
from .jsonio import rounded, write_json
from .matching import MatchConfig, best_matches
from .mesh import load_mesh, save_mesh
from .profile import load_profile, load_profile_dir, save_profile
from .extraction import profile_from_mesh
from .synth import FragmentSpec, VesselSpec, fragment_vessel, synth_vessel


def _add_match_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--min-overlap", type=int, default=8, help="fewest overlapping samples (default 8)")
    p.add_argument("--threshold", type=float, default=0.15, help="accept threshold, mm (default 0.15)")
    p.add_argument("--top-k", type=int, default=5, help="ranked matches to keep (default 5)")
    p.add_argument("--allow-reversal", action="store_true", help="also try reversed profiles")


def _config(args) -> MatchConfig:
    return MatchConfig(
        min_overlap=args.min_overlap,
        accept_threshold=args.threshold,
        allow_reversal=args.allow_reversal,
        top_k=args.top_k,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sherdkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic vessel mesh")
    p.add_argument("--spec", required=True, help="vessel spec JSON")
    p.add_argument("--out", required=True, help="output mesh (.ply or .obj)")
    p.add_argument("--ascii", action="store_true", help="write ASCII PLY instead of binary")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("fragment", help="break a synthetic vessel into re-posed sherds")
    p.add_argument("--mesh", required=True, help="vessel mesh from synth")
    p.add_argument("--cuts", required=True, help="fragment spec JSON")
    p.add_argument("--seed", type=int, default=None,
                   help="re-posing seed; omit to keep original poses")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("extract", help="thickness profile from a sherd mesh")
    p.add_argument("--mesh", required=True)
    p.add_argument("--step", type=float, default=1.0, help="sampling step, mm (default 1.0)")
    p.add_argument("--n-candidates", type=int, default=360, help="azimuths scanned (default 360)")
    p.add_argument("--orient", default=None,
                   help="dx,dy,dz reference the axis direction is aligned with")
    p.add_argument("--out", required=True, help="profile output (.tp.json or .csv)")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("match", help="rank alignments of two profiles")
    p.add_argument("--a", required=True, dest="profile_a")
    p.add_argument("--b", required=True, dest="profile_b")
    _add_match_flags(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("assemble", help="greedy assembly session over a profile directory")
    p.add_argument("--profiles", required=True)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--interactive", action="store_true", help="terminal prompt loop")
    mode.add_argument("--auto", action="store_true",
                      help="commit every acceptable candidate (side RIGHT)")
    p.add_argument("--out", default=None, help="layout JSON to write at the end")
    _add_match_flags(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("serve", help="run the assembly HTTP service")
    p.add_argument("--profiles", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=7131)
    p.add_argument("--static", default=None, help="directory of UI files to serve at /")
    p.add_argument("--log", default=None, help="append-only session log file")
    _add_match_flags(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("fixtures", help="write the bundled reference profiles")
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("report", help="render a layout to CSV and figures")
    p.add_argument("--layout", required=True)
    p.add_argument("--profiles", default=None, help="profile directory for the overlay figure")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--json", action="store_true")

    return parser


def _cmd_synth(args) -> int:
    with open(args.spec, encoding="utf-8") as fh:
        spec = VesselSpec.from_dict(json.load(fh))
    mesh = synth_vessel(spec)
    save_mesh(mesh, args.out, binary=not args.ascii)
    _emit(args, {"out": args.out, "vertices": len(mesh.vertices), "triangles": len(mesh.triangles)},
          f"wrote {args.out}: {len(mesh.vertices)} vertices, {len(mesh.triangles)} triangles")
    return 0


def _cmd_fragment(args) -> int:
    mesh = load_mesh(args.mesh)
    with open(args.cuts, encoding="utf-8") as fh:
        spec = FragmentSpec.from_dict(json.load(fh))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for sherd, gt in fragment_vessel(mesh, spec, args.seed):
        mesh_path = out_dir / f"{sherd.name}.ply"
        save_mesh(sherd, mesh_path)
        write_json(
            out_dir / f"{sherd.name}.gt.json",
            {
                "zone_label": gt.zone_label,
                "height_interval": list(gt.height_interval),
                "angular_interval": list(gt.angular_interval),
                "rotation": gt.rotation.tolist(),
                "translation": gt.translation.tolist(),
            },
            ndigits=12,
        )
        written.append(str(mesh_path))
    _emit(args, {"sherds": written}, "\n".join(f"wrote {w}" for w in written))
    return 0


def _cmd_extract(args) -> int:
    mesh = load_mesh(args.mesh)
    orient = None
    if args.orient is not None:
        orient = np.array([float(x) for x in args.orient.split(",")])
        if orient.shape != (3,):
            raise ValueError("--orient expects dx,dy,dz")
    axis, plane, profile = profile_from_mesh(
        mesh, step=args.step, n_candidates=args.n_candidates, orient=orient
    )
    save_profile(profile, args.out)
    _emit(
        args,
        {
            "out": args.out,
            "samples": len(profile),
            "azimuth_deg": plane.azimuth,
            "arc_span_mm": plane.arc_span,
            "fit_rms_mm": axis.fit_rms,
        },
        f"wrote {args.out}: {len(profile)} samples "
        f"(azimuth {plane.azimuth:.1f} deg, span {plane.arc_span:.1f} mm, "
        f"fit rms {axis.fit_rms:.4f} mm)",
    )
    return 0


def _cmd_match(args) -> int:
    a = load_profile(args.profile_a)
    b = load_profile(args.profile_b)
    results = best_matches(a, b, _config(args))
    if args.json:
        print(json.dumps(rounded([m.to_dict() for m in results]), sort_keys=True, indent=2))
    else:
        print(f"{a.sherd_id} ({len(a)}) vs {b.sherd_id} ({len(b)}):")
        for rank, m in enumerate(results, start=1):
            rev = " reversed" if m.reversed_b else ""
            print(
                f"  #{rank}: offset {m.offset:+d}, overlap {m.overlap}, "
                f"score {m.score:.4f} mm{rev}"
            )
    return 0


def _cmd_assemble(args) -> int:
    profiles = load_profile_dir(args.profiles)
    state = init_assembly(profiles, _config(args))
    if args.auto:
        while True:
            top = next((c for c in state.candidates if c.accepted), None)
            if top is None:
                break
            state = commit(state, top.sherd_id, Side.RIGHT)
    else:
        state = _interactive_loop(state)
    if args.out:
        export_layout(state, args.out)
    summary = {
        "strip": strip_order(state),
        "committed": len(state.log),
        "unplaced": [p.sherd_id for p in state.pool],
        "layout": args.out,
    }
    _emit(
        args,
        summary,
        f"strip: {' | '.join(summary['strip'])}\n"
        f"committed {summary['committed']}, unplaced: {summary['unplaced'] or 'none'}"
        + (f"\nwrote {args.out}" if args.out else ""),
    )
    return 0


def _print_session(state) -> None:
    print(f"\nmeta: {len(state.meta.profile)} samples | strip: {' | '.join(strip_order(state))}")
    if not state.candidates:
        print("pool empty; type done to finish")
        return
    print("candidates:")
    for c in state.candidates:
        if c.match is None:
            print(f"  {c.sherd_id}: too short to match (REJECTED)")
            continue
        flag = "" if c.accepted else " (REJECTED)"
        print(
            f"  {c.sherd_id}: offset {c.match.offset:+d}, overlap {c.match.overlap}, "
            f"score {c.match.score:.4f}{flag}"
        )


def _interactive_loop(state):
    print("commands: commit <sherd> <LEFT|RIGHT> [override] | undo | done")
    while True:
        _print_session(state)
        try:
            line = input("> ").strip()
        except EOFError:
            break
        if not line:
            continue
        words = line.split()
        try:
            if words[0] == "done":
                break
            if words[0] == "undo":
                state = undo(state)
            elif words[0] == "commit" and len(words) >= 3:
                state = commit(
                    state, words[1], words[2].upper(), override="override" in words[3:]
                )
            else:
                print("unrecognized command")
        except (SherdKitError, ValueError) as exc:
            print(f"error: {exc}")
    return state


def _cmd_serve(args) -> int:
    from .service import serve

    serve(
        args.profiles,
        cfg=_config(args),
        host=args.host,
        port=args.port,
        static_dir=args.static,
        log_path=args.log,
    )
    return 0


def _cmd_fixtures(args) -> int:
    paths = write_fixture_files(args.out)
    _emit(args, {"written": [str(p) for p in paths]},
          "\n".join(f"wrote {p}" for p in paths))
    return 0


def _cmd_report(args) -> int:
    from .report import render_report

    with open(args.layout, encoding="utf-8") as fh:
        layout = json.load(fh)
    profiles = load_profile_dir(args.profiles) if args.profiles else None
    paths = render_report(layout, args.out_dir, profiles)
    _emit(args, {"written": [str(p) for p in paths]},
          "\n".join(f"wrote {p}" for p in paths))
    return 0


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(rounded(payload), sort_keys=True, indent=2))
    else:
        print(text)


_COMMANDS = {
    "synth": _cmd_synth,
    "fragment": _cmd_fragment,
    "extract": _cmd_extract,
    "match": _cmd_match,
    "assemble": _cmd_assemble,
    "serve": _cmd_serve,
    "fixtures": _cmd_fixtures,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (SherdKitError, OSError, ValueError, json.JSONDecodeError) as exc:
        if getattr(args, "json", False):
            print(
                json.dumps({"error": type(exc).__name__, "message": str(exc)}),
                file=sys.stderr,
            )
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
