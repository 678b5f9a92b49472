"""Statistical tooling: deck budgets, reveal-site families and histograms,
chi-square tests, and the collection sweeps that drive the zero-knowledge
comparison."""

import json
import math
from collections import Counter

import pytest

from makaro_zkp import (
    CardBudget,
    InsufficientTrials,
    ProtocolError,
    PuzzleStats,
    RandomSource,
    SiteFamily,
    SiteHistograms,
    Transcript,
    card_budget,
    cell_card,
    collect_protocol_histograms,
    collect_simulator_histograms,
    compare_collections,
    compare_histograms,
    encoding_card,
    make_prover,
    parse_puzzle,
    run_full_protocol,
    simulate_transcript,
    site_plan,
    solution_comparison,
    stats,
    uniformity_sweep,
    uniformity_test,
    zk_comparison,
)
from makaro_zkp.analysis import MARGINAL_THRESHOLD, MIN_EXPECTED


def perm_family(n: int) -> SiteFamily:
    return SiteFamily("t/perm", "perm",
                      tuple(cell_card("T", i) for i in range(1, n + 1)), n)


class TestCardBudget:
    def test_example_deck(self, example_grid):
        assert card_budget(stats(example_grid)) == CardBudget(
            n=20, k=5, cell_cards=20, helping_cards=5,
            encoding_cards=36, total=61)

    def test_minimal_deck(self):
        assert card_budget(PuzzleStats(1, 1)).total == 6

    def test_mid_size_deck(self):
        b = card_budget(PuzzleStats(9, 3))
        assert (b.cell_cards, b.helping_cards, b.encoding_cards) == (9, 3, 20)
        assert b.total == 32

    def test_total_is_cells_plus_nine_k_minus_four(self):
        for n, k in ((1, 1), (4, 2), (20, 5), (100, 9)):
            assert card_budget(PuzzleStats(n, k)).total == n + 9 * k - 4

    def test_encoding_sets_cover_the_longest_window(self, quad_grid):
        b = card_budget(stats(quad_grid))  # k=2: window length 2*2-1 = 3
        assert b.encoding_cards == 4 * 3
        assert b.total == 18


class TestSiteFamily:
    def test_permutation_family(self):
        fam = perm_family(3)
        assert fam.size() == 6
        cards = fam.support
        assert fam.contains((cards[2], cards[0], cards[1]))
        assert not fam.contains((cards[0], cards[1]))            # wrong length
        assert not fam.contains((cards[0], cards[1], cards[1]))  # repeat
        assert not fam.contains((cards[0], cards[1], encoding_card("a", 9)))

    def test_pick_family(self):
        sup = tuple(encoding_card("b", i) for i in range(2, 6))
        fam = SiteFamily("t/pick", "pick", sup, 1)
        assert fam.size() == 4
        assert fam.contains((sup[0],))
        assert not fam.contains((encoding_card("b", 1),))
        assert not fam.contains(sup[:2])

    def test_arrangement_family(self):
        sup = tuple(encoding_card("c", i) for i in range(1, 9))
        fam = SiteFamily("t/arr", "arrangement", sup, 5)
        assert fam.size() == math.perm(8, 5) == 6720
        assert fam.contains((sup[7], sup[0], sup[3], sup[2], sup[5]))
        assert not fam.contains((sup[0], sup[0], sup[3], sup[2], sup[5]))
        assert not fam.contains(sup[:4])


class TestSitePlan:
    def test_example_grid_unit_count(self, example_grid):
        plan = site_plan(example_grid)
        assert len(plan) == 191
        keys = [fam.key for fam in plan]
        assert len(set(keys)) == 191
        marginals = [fam for fam in plan if "/pos" in fam.key]
        assert len(marginals) == 95
        assert all(fam.kind == "pick" and fam.take == 1 for fam in marginals)

    def test_every_unit_is_directly_testable(self, example_grid):
        # splitting leaves no family with more patterns than the threshold
        for fam in site_plan(example_grid):
            assert fam.size() <= MARGINAL_THRESHOLD

    def test_no_splitting_when_threshold_is_huge(self, example_grid):
        plan = site_plan(example_grid, marginal_threshold=10 ** 9)
        assert len(plan) == 111
        assert not any("/pos" in fam.key for fam in plan)

    def test_small_grid_splits_nothing_by_default(self, quad_grid):
        plan = site_plan(quad_grid)
        assert len(plan) == 16
        assert not any("/pos" in fam.key for fam in plan)

    def test_threshold_one_splits_every_variable_site(self, quad_grid):
        for fam in site_plan(quad_grid, marginal_threshold=1):
            assert fam.size() == 1 or (fam.kind == "pick" and fam.take == 1)


class TestSiteHistograms:
    def run_transcript(self, grid, solution, seed):
        source = RandomSource.from_seed(seed)
        verdict, transcript = run_full_protocol(grid, make_prover(solution, source),
                                                source)
        assert verdict.accepted
        return transcript

    def test_counts_one_pattern_per_site_per_transcript(self, quad_grid):
        solution = {(0, 0): 1, (0, 1): 2, (1, 0): 2, (1, 1): 1}
        hist = SiteHistograms(quad_grid)
        for seed in ("h1", "h2", "h3"):
            hist.add_transcript(self.run_transcript(quad_grid, solution, seed))
        assert hist.transcripts == 3
        for fam in hist.families:
            assert sum(hist.counts[fam.key].values()) == 3
            for pattern in hist.counts[fam.key]:
                assert fam.contains(pattern)

    def test_split_sites_count_each_position(self, example_grid, example_solution):
        hist = SiteHistograms(example_grid)
        hist.add_transcript(self.run_transcript(example_grid, example_solution, "m1"))
        row1 = [fam.key for fam in hist.families
                if fam.key.startswith("arrow/4.3/row1/pos")]
        assert len(row1) == 9
        for key in row1:
            counter = hist.counts[key]
            assert sum(counter.values()) == 1
            ((card,),) = counter  # a single one-card pattern
            assert card.set == "enc:a"

    def test_transcript_from_another_grid_is_rejected(self, quad_grid):
        other = parse_puzzle("makaro 1 1\nZ\n")
        source = RandomSource.from_seed("x")
        _, transcript = run_full_protocol(other, make_prover({(0, 0): 1}, source),
                                          source)
        with pytest.raises(ValueError):
            SiteHistograms(quad_grid).add_transcript(transcript)

    def test_merge_adds_counts(self, quad_grid):
        solution = {(0, 0): 1, (0, 1): 2, (1, 0): 2, (1, 1): 1}
        a = SiteHistograms(quad_grid)
        b = SiteHistograms(quad_grid)
        a.add_transcript(self.run_transcript(quad_grid, solution, "ma"))
        b.add_transcript(self.run_transcript(quad_grid, solution, "mb"))
        b.add_transcript(self.run_transcript(quad_grid, solution, "mc"))
        a.merge(b)
        assert a.transcripts == 3
        for fam in a.families:
            assert sum(a.counts[fam.key].values()) == 3

    def test_merge_requires_the_same_site_plan(self, quad_grid, cross_grid):
        with pytest.raises(ValueError):
            SiteHistograms(quad_grid).merge(SiteHistograms(cross_grid))


class TestUniformityTest:
    def test_exactly_uniform_counts_pass(self):
        fam = perm_family(3)
        counter = Counter({p: 50 for p in
                           [(a, b, c) for a in fam.support for b in fam.support
                            for c in fam.support
                            if len({a, b, c}) == 3]})
        report = uniformity_test(fam, counter)
        assert report.passed
        assert report.statistic == pytest.approx(0.0)
        assert report.p_value == pytest.approx(1.0)
        assert (report.bins, report.df, report.draws) == (6, 5, 300)

    def test_point_mass_fails(self):
        fam = perm_family(3)
        report = uniformity_test(fam, Counter({fam.support: 600}))
        assert not report.passed
        assert report.p_value < 1e-12

    def test_moderate_skew_fails(self):
        fam = perm_family(3)
        patterns = sorted(Counter({p: 1 for p in
                                   [(a, b, c) for a in fam.support
                                    for b in fam.support for c in fam.support
                                    if len({a, b, c}) == 3]}))
        counts = [160, 88, 88, 88, 88, 88]
        report = uniformity_test(fam, Counter(dict(zip(patterns, counts))))
        assert not report.passed
        assert report.p_value < 0.01

    def test_unobserved_patterns_contribute_their_expectation(self):
        fam = perm_family(3)
        patterns = sorted(Counter({p: 1 for p in
                                   [(a, b, c) for a in fam.support
                                    for b in fam.support for c in fam.support
                                    if len({a, b, c}) == 3]}))
        counter = Counter(dict(zip(patterns[:5], [6] * 5)))  # 30 draws, one bin empty
        report = uniformity_test(fam, counter)
        # five bins at (6-5)^2/5 plus the empty bin's full expectation of 5
        assert report.statistic == pytest.approx(5 * 0.2 + 5.0)
        assert report.draws == 30

    def test_too_few_draws_raise(self):
        fam = perm_family(3)
        with pytest.raises(InsufficientTrials):
            uniformity_test(fam, Counter({fam.support: 20}))
        with pytest.raises(InsufficientTrials):
            uniformity_test(fam, Counter())

    def test_draw_floor_is_the_validity_threshold(self):
        fam = perm_family(3)
        counter = Counter({p: 5 for p in
                           [(a, b, c) for a in fam.support for b in fam.support
                            for c in fam.support if len({a, b, c}) == 3]})
        assert sum(counter.values()) / fam.size() == MIN_EXPECTED
        assert uniformity_test(fam, counter).passed  # exactly at the floor is valid

    def test_pattern_outside_the_support_fails_immediately(self):
        fam = perm_family(3)
        bad = (fam.support[0], fam.support[1], encoding_card("d", 3))
        report = uniformity_test(fam, Counter({bad: 1}))
        assert not report.passed
        assert report.df == 0
        assert "outside support" in report.note

    def test_single_pattern_site_passes_trivially(self):
        fam = perm_family(1)
        report = uniformity_test(fam, Counter({fam.support: 7}))
        assert report.passed
        assert report.df == 0
        assert report.note == "single possible pattern"

    def test_real_runs_of_a_single_room_look_uniform(self):
        grid = parse_puzzle("makaro 1 3\nA A A\n")
        hist = collect_protocol_histograms(
            grid, {(0, 0): 1, (0, 1): 2, (0, 2): 3}, "unif", trials=3000)
        report = uniformity_sweep(hist)
        assert report.passed
        by_site = {r.site: r for r in report.sites}
        assert by_site["room/A/cells"].draws == 3000
        assert by_site["room/A/cells"].bins == 6


class TestCompareHistograms:
    def test_identical_counters_pass(self):
        fam = perm_family(2)
        a = Counter({fam.support: 80, fam.support[::-1]: 70})
        report = compare_histograms(fam, a, Counter(a))
        assert report.passed
        assert report.statistic == pytest.approx(0.0)
        assert (report.draws, report.draws_b) == (150, 150)

    def test_disjoint_collections_fail(self):
        fam = perm_family(2)
        a = Counter({fam.support: 100})
        b = Counter({fam.support[::-1]: 100})
        report = compare_histograms(fam, a, b)
        assert not report.passed
        assert report.statistic == pytest.approx(200.0)
        assert report.df == 1

    def test_skewed_collections_fail(self):
        fam = perm_family(2)
        a = Counter({fam.support: 300, fam.support[::-1]: 300})
        b = Counter({fam.support: 450, fam.support[::-1]: 150})
        report = compare_histograms(fam, a, b)
        assert not report.passed
        assert report.statistic == pytest.approx(80.0)

    def test_rare_patterns_pool_into_a_residual_bin(self):
        fam = perm_family(3)
        p, q, r = sorted(perm_family(3).support), None, None
        pats = [(p[0], p[1], p[2]), (p[1], p[0], p[2]), (p[2], p[0], p[1])]
        a = Counter({pats[0]: 100, pats[1]: 3, pats[2]: 2})
        b = Counter({pats[0]: 100, pats[1]: 2, pats[2]: 3})
        report = compare_histograms(fam, a, b)
        assert report.bins == 2  # the two rare patterns share one bin
        assert report.passed

    def test_tiny_residual_joins_the_last_kept_bin(self):
        fam = perm_family(3)
        p = sorted(fam.support)
        pats = [(p[0], p[1], p[2]), (p[1], p[0], p[2]), (p[2], p[0], p[1])]
        a = Counter({pats[0]: 50, pats[1]: 50, pats[2]: 2})
        b = Counter({pats[0]: 50, pats[1]: 50, pats[2]: 1})
        report = compare_histograms(fam, a, b)
        assert report.bins == 2
        assert report.passed

    def test_everything_pooled_is_a_trivial_pass(self):
        fam = perm_family(2)
        a = Counter({fam.support: 5, fam.support[::-1]: 1})
        b = Counter({fam.support: 5, fam.support[::-1]: 2})
        report = compare_histograms(fam, a, b)
        assert report.passed
        assert report.df == 0
        assert report.note == "pooled to a single bin"

    def test_empty_collection_raises(self):
        fam = perm_family(2)
        with pytest.raises(InsufficientTrials):
            compare_histograms(fam, Counter({fam.support: 10}), Counter())

    def test_pooling_ignores_counter_insertion_order(self):
        fam = perm_family(3)
        p = sorted(fam.support)
        pats = [(p[0], p[1], p[2]), (p[1], p[0], p[2]), (p[2], p[0], p[1])]
        a = Counter({pats[0]: 60, pats[1]: 40, pats[2]: 4})
        b = Counter({pats[2]: 4, pats[1]: 38, pats[0]: 62})
        fwd = compare_histograms(fam, a, b)
        rev = compare_histograms(fam, Counter(dict(reversed(a.items()))),
                                 Counter(dict(reversed(b.items()))))
        assert fwd == rev


QUAD_SOLUTION = {(0, 0): 1, (0, 1): 2, (1, 0): 2, (1, 1): 1}
QUAD_MIRROR = {(0, 0): 2, (0, 1): 1, (1, 0): 1, (1, 1): 2}


class TestCollection:
    def test_trial_count_and_per_site_draws(self, quad_grid):
        hist = collect_protocol_histograms(quad_grid, QUAD_SOLUTION, "c1", trials=50)
        assert hist.transcripts == 50
        assert all(sum(c.values()) == 50 for c in hist.counts.values())

    def test_worker_count_does_not_change_the_histograms(self, quad_grid):
        serial = collect_protocol_histograms(quad_grid, QUAD_SOLUTION, "wk", trials=60)
        parallel = collect_protocol_histograms(quad_grid, QUAD_SOLUTION, "wk",
                                               trials=60, workers=2)
        assert serial.transcripts == parallel.transcripts == 60
        assert serial.counts == parallel.counts

    def test_simulator_collection_matches_across_workers(self, quad_grid):
        serial = collect_simulator_histograms(quad_grid, "wks", trials=60)
        parallel = collect_simulator_histograms(quad_grid, "wks", trials=60, workers=3)
        assert serial.counts == parallel.counts

    def test_rule_breaking_solution_is_refused(self, quad_grid):
        bad = {(0, 0): 1, (0, 1): 2, (1, 0): 1, (1, 1): 2}
        with pytest.raises(ProtocolError):
            collect_protocol_histograms(quad_grid, bad, "c2", trials=5)

    def test_trials_must_be_positive(self, quad_grid):
        with pytest.raises(ValueError):
            collect_protocol_histograms(quad_grid, QUAD_SOLUTION, "c3", trials=0)

    def test_collections_from_different_grids_do_not_compare(self, quad_grid,
                                                             cross_grid,
                                                             cross_solution):
        a = collect_protocol_histograms(quad_grid, QUAD_SOLUTION, "c4", trials=5)
        b = collect_protocol_histograms(cross_grid, cross_solution, "c4", trials=5)
        with pytest.raises(ValueError):
            compare_collections("mismatch", a, b)


class TestComparisonReports:
    def test_real_versus_simulated_runs_pass(self, quad_grid):
        report = zk_comparison(quad_grid, QUAD_SOLUTION, "zkq", trials=800)
        assert report.passed
        assert not report.failures()
        assert report.tested_sites == 14
        assert report.alpha_site == pytest.approx(0.01 / 14)

    def test_two_valid_solutions_are_indistinguishable(self, quad_grid):
        report = solution_comparison(quad_grid, QUAD_SOLUTION, QUAD_MIRROR,
                                     "solq", trials=800)
        assert report.passed

    def test_doctored_histograms_are_caught(self, quad_grid):
        real = collect_protocol_histograms(quad_grid, QUAD_SOLUTION, "d1", trials=400)
        fake = collect_protocol_histograms(quad_grid, QUAD_SOLUTION, "d2", trials=400)
        key = "room/A/cells"
        pattern = (cell_card("A", 1), cell_card("A", 2))
        fake.counts[key] = Counter({pattern: 400})  # prover who never shuffles
        report = compare_collections("doctored", real, fake)
        assert not report.passed
        assert [r.site for r in report.failures()] == [key]

    def test_uniformity_sweep_needs_enough_trials(self):
        grid = parse_puzzle("makaro 1 3\nA A A\n")
        hist = collect_protocol_histograms(
            grid, {(0, 0): 1, (0, 1): 2, (0, 2): 3}, "few", trials=20)
        with pytest.raises(InsufficientTrials):
            uniformity_sweep(hist)  # 6-bin sites need at least 30 draws

    def test_text_report_is_deterministic_and_readable(self, quad_grid):
        a = zk_comparison(quad_grid, QUAD_SOLUTION, "rep", trials=400)
        b = zk_comparison(quad_grid, QUAD_SOLUTION, "rep", trials=400)
        text = a.to_text()
        assert text == b.to_text()
        lines = text.splitlines()
        assert lines[0] == "protocol vs simulator: PASS"
        assert "familywise alpha" in lines[1]
        assert len(lines) == 3 + len(a.sites)  # verdict + alpha + header + rows

    def test_records_serialize_to_json(self, quad_grid):
        report = zk_comparison(quad_grid, QUAD_SOLUTION, "js", trials=400)
        payload = json.dumps(report.to_records(), sort_keys=True)
        rows = json.loads(payload)
        assert len(rows) == len(report.sites)
        assert all(row["passed"] for row in rows)
