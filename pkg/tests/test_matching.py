"""Profile alignment against the brute-force oracle, plus ranking properties."""

import random

import numpy as np
import pytest

from sherdkit.errors import (
    NoFeasibleOffsetError,
    NoOverlapError,
    StepMismatchError,
    ValidationError,
)
from sherdkit.matching import MatchConfig, MatchResult, best_matches, is_acceptable, sad_at_offset
from sherdkit.profile import ThicknessProfile

from oracles import oracle_best_matches, oracle_sad


def prof(values, step=1.0, sherd_id=""):
    return ThicknessProfile(np.asarray(values, dtype=np.float64), step=step, sherd_id=sherd_id)


def rand_profile(rng, n):
    return [rng.uniform(3.0, 9.0) for _ in range(n)]


class TestSadAtOffset:
    def test_hand_worked_example(self):
        a = prof([5.0, 5.2, 5.4])
        b = prof([5.1, 5.2, 5.3])
        m = sad_at_offset(a, b, 0)
        assert m.overlap == 3
        assert m.sad == pytest.approx(0.2)
        assert m.score == pytest.approx(0.2 / 3)

    def test_partial_overlap_left(self):
        a = prof([5.0, 5.2, 5.4])
        b = prof([9.0, 5.0])
        m = sad_at_offset(a, b, -1)
        # only b[1] lands on a[0]
        assert m.overlap == 1
        assert m.sad == 0.0

    @pytest.mark.parametrize("offset", [12, 10, -4, -9])
    def test_no_overlap_raises(self, offset):
        a = prof([5.0] * 10)
        b = prof([5.0] * 4)
        with pytest.raises(NoOverlapError):
            sad_at_offset(a, b, offset)

    def test_matches_oracle_bit_for_bit(self):
        rng = random.Random(20210)
        for _ in range(200):
            av = rand_profile(rng, rng.randint(1, 40))
            bv = rand_profile(rng, rng.randint(1, 40))
            offset = rng.randint(-len(bv) + 1, len(av) - 1)
            sad, overlap = oracle_sad(av, bv, offset)
            m = sad_at_offset(prof(av), prof(bv), offset)
            assert m.sad == sad
            assert m.overlap == overlap

    def test_step_mismatch(self):
        with pytest.raises(StepMismatchError):
            sad_at_offset(prof([5.0] * 9), prof([5.0] * 9, step=0.5), 0)


class TestBestMatchesOracle:
    """The vectorized scan must reproduce the sequential oracle exactly."""

    def test_random_pairs_equal_oracle(self):
        rng = random.Random(77)
        for trial in range(300):
            av = rand_profile(rng, rng.randint(8, 64))
            bv = rand_profile(rng, rng.randint(8, 64))
            min_overlap = rng.randint(1, 8)
            top_k = rng.randint(1, 7)
            allow_rev = rng.random() < 0.5
            cfg = MatchConfig(min_overlap=min_overlap, top_k=top_k, allow_reversal=allow_rev)
            got = best_matches(prof(av), prof(bv), cfg)
            want = oracle_best_matches(av, bv, min_overlap=min_overlap,
                                       top_k=top_k, allow_reversal=allow_rev)
            assert len(got) == len(want), f"trial {trial}"
            for m, (off, over, sad, score, rev) in zip(got, want):
                assert m.offset == off, f"trial {trial}"
                assert m.overlap == over
                assert m.sad == sad  # bit-exact, no tolerance
                assert m.score == score
                assert m.reversed_b == rev

    def test_short_profiles_against_oracle(self):
        # tiny lengths stress the feasibility edges
        rng = random.Random(4242)
        for _ in range(200):
            av = rand_profile(rng, rng.randint(1, 6))
            bv = rand_profile(rng, rng.randint(1, 6))
            cfg = MatchConfig(min_overlap=1, top_k=50)
            got = best_matches(prof(av), prof(bv), cfg)
            want = oracle_best_matches(av, bv, min_overlap=1, top_k=50)
            assert [(m.offset, m.overlap, m.sad) for m in got] == [
                (o, ov, s) for o, ov, s, _, _ in want
            ]


class TestRankingProperties:
    def test_self_match_is_perfect(self):
        rng = random.Random(9)
        av = rand_profile(rng, 30)
        top = best_matches(prof(av), prof(av), MatchConfig())[0]
        assert (top.offset, top.overlap, top.sad, top.score) == (0, 30, 0.0, 0.0)

    def test_constant_profiles_prefer_centered_zero_offset(self):
        a = prof([5.0] * 10)
        b = prof([5.0] * 4)
        got = best_matches(a, b, MatchConfig(min_overlap=4, top_k=5))
        # every feasible offset scores 0; overlap then |offset| break the tie
        assert [m.offset for m in got] == [0, 1, 2, 3, 4]
        assert got[0].overlap == 4

    def test_embedded_copy_recovered(self):
        rng = random.Random(31337)
        for _ in range(50):
            n = rng.randint(20, 80)
            av = rand_profile(rng, n)
            m = rng.randint(8, min(20, n))
            p = rng.randint(0, n - m)
            bv = av[p : p + m]
            top = best_matches(prof(av), prof(bv), MatchConfig())[0]
            assert top.offset == p
            assert top.sad == 0.0
            assert top.overlap == m

    def test_swap_negates_rank1_offset(self):
        rng = random.Random(55)
        for _ in range(50):
            av = rand_profile(rng, rng.randint(10, 50))
            bv = rand_profile(rng, rng.randint(10, 50))
            cfg = MatchConfig(min_overlap=8)
            ab = best_matches(prof(av), prof(bv), cfg)[0]
            ba = best_matches(prof(bv), prof(av), cfg)[0]
            assert ba.offset == -ab.offset
            assert ba.sad == ab.sad
            assert ba.overlap == ab.overlap

    def test_score_bounded_by_value_range(self):
        rng = random.Random(2)
        av = rand_profile(rng, 40)
        bv = rand_profile(rng, 25)
        worst = max(abs(x - y) for x in av for y in bv)
        for m in best_matches(prof(av), prof(bv), MatchConfig(top_k=100)):
            assert 0.0 <= m.score <= worst

    def test_palindrome_ties_prefer_unreversed(self):
        a = prof([5.0, 6.0, 7.0, 6.0, 5.0, 4.0, 5.0, 6.0])
        b = prof([5.5, 6.5, 6.5, 5.5])  # palindrome: reversal changes nothing
        got = best_matches(a, b, MatchConfig(min_overlap=2, allow_reversal=True, top_k=2))
        assert got[0].reversed_b is False

    def test_scan_ignores_profile_position_metadata(self):
        av = [5.0, 5.5, 6.0, 6.5, 7.0, 7.5, 8.0, 8.5]
        a1 = ThicknessProfile(np.array(av), sherd_id="x", origin_height=12.0)
        a2 = ThicknessProfile(np.array(av), sherd_id="y")
        b = prof([6.0, 6.5, 7.0, 7.5, 8.0, 8.5, 9.0, 9.5])
        cfg = MatchConfig(min_overlap=4)
        r1 = best_matches(a1, b, cfg)
        r2 = best_matches(a2, b, cfg)
        assert [(m.offset, m.sad) for m in r1] == [(m.offset, m.sad) for m in r2]


class TestAcceptance:
    def test_threshold_is_inclusive(self):
        m = best_matches(prof([5.0, 5.3] * 5), prof([5.15, 5.45] * 5),
                         MatchConfig(min_overlap=8))[0]
        assert m.score > 0
        assert is_acceptable(m, MatchConfig(accept_threshold=m.score))
        assert not is_acceptable(m, MatchConfig(accept_threshold=m.score * (1 - 1e-12)))

    def test_overlap_floor(self):
        m = MatchResult(offset=0, overlap=5, sad=0.0, score=0.0)
        assert not is_acceptable(m, MatchConfig(min_overlap=8))
        assert is_acceptable(m, MatchConfig(min_overlap=5))


class TestErrorsAndValidation:
    def test_profiles_shorter_than_min_overlap(self):
        with pytest.raises(NoFeasibleOffsetError):
            best_matches(prof([5.0] * 5), prof([5.0] * 20), MatchConfig(min_overlap=8))

    def test_step_mismatch(self):
        with pytest.raises(StepMismatchError):
            best_matches(prof([5.0] * 9), prof([5.0] * 9, step=2.0), MatchConfig())

    def test_match_result_validation(self):
        with pytest.raises(ValidationError):
            MatchResult(offset=0, overlap=0, sad=0.0, score=0.0)
        with pytest.raises(ValidationError):
            MatchResult(offset=0, overlap=4, sad=1.0, score=0.5)

    @pytest.mark.parametrize(
        "kw", [dict(min_overlap=0), dict(top_k=0), dict(accept_threshold=0.0)]
    )
    def test_match_config_validation(self, kw):
        with pytest.raises(ValidationError):
            MatchConfig(**kw)

    def test_to_dict_keys(self):
        m = MatchResult(offset=-3, overlap=9, sad=0.9, score=0.1)
        assert m.to_dict() == {
            "offset": -3, "overlap": 9, "sad": 0.9, "score": 0.1, "reversed": False,
        }
