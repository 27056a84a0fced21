"""Acceptance checks, one test per criterion.

Each test prints a single "[criterion N] PASS/FAIL - description" line so a
plain pytest run doubles as an acceptance report. Oracles here are written
straight-line and independently of the library internals they check.
"""

import json
import math
import random
from contextlib import contextmanager

import pytest

from wordassoc import (
    CorpusIndex,
    MeasureConfig,
    MeasureId,
    NullModelConfig,
    PairStatistics,
    PiKey,
    PiTable,
    average_deviation,
    build_index,
    compute_z,
    enumerate_pair_occurrences,
    expected_z,
    max_nonoverlapped,
    pair_statistics,
    pi_exact,
    pi_monte_carlo,
    score,
    score_from_stats,
    spearman,
)
from wordassoc.cli import main
from wordassoc.measures import (
    score_cpmi,
    score_cpmid,
    score_cpmiz,
    score_csr,
    score_dice,
    score_jaccard,
    score_pmi,
    score_pmid,
    score_pmiz,
)


_CAPSYS = None


@pytest.fixture(autouse=True)
def _live_reporting(capsys):
    # lets criterion() write through pytest's capture so the acceptance
    # summary shows in a plain run
    global _CAPSYS
    _CAPSYS = capsys
    yield
    _CAPSYS = None


def _report(line):
    if _CAPSYS is not None:
        with _CAPSYS.disabled():
            print(line, flush=True)
    else:
        print(line, flush=True)


@contextmanager
def criterion(number, description):
    try:
        yield
    except BaseException:
        _report(f"[criterion {number}] FAIL - {description}")
        raise
    _report(f"[criterion {number}] PASS - {description}")


def random_stats(rng, min_fxy=0):
    """A random internally consistent count tuple wrapped as PairStatistics."""
    w = rng.randint(50, 1_000_000)
    fx = rng.randint(1, w // 2)
    fy = rng.randint(1, w // 2)
    fxy = rng.randint(min(min_fxy, fx, fy), min(fx, fy))
    d = rng.randint(10, 100_000)
    dx = rng.randint(1, d)
    dy = rng.randint(1, d)
    dxy = rng.randint(min(min_fxy, dx, dy), min(dx, dy))
    k = rng.randint(dxy, min(dx, dy))
    return PairStatistics(x="x", y="y", s=rng.randint(1, 50), fxy=fxy, dxy=dxy,
                          k=k, fx=fx, fy=fy, dx=dx, dy=dy, w=w, d=d)


def assert_matches(result, oracle, *, rel=1e-12):
    """oracle is None for undefined; otherwise compare at relative error."""
    if oracle is None:
        assert not result.defined
        return
    assert result.defined
    value = result.value
    assert value == oracle or abs(value - oracle) <= rel * abs(oracle), (
        f"value {value!r} vs oracle {oracle!r}"
    )


class TestCriterion1:
    """Every measure agrees with a straight-line formula oracle."""

    @staticmethod
    def oracles(st, delta, z, ez):
        fxy, fx, fy, w = st.fxy, st.fx, st.fy, st.w
        dxy, dx, dy, d = st.dxy, st.dx, st.dy, st.d
        penalty_f = math.sqrt(fx) * math.sqrt(math.log(delta) / -2.0)
        penalty_d = math.sqrt(dx) * math.sqrt(math.log(delta) / -2.0)
        out = {}
        out["pmi"] = None if fxy == 0 else math.log(fxy / (fx * fy / w))
        out["cpmi"] = None if fxy == 0 else math.log(fxy / (fx * fy / w + penalty_f))
        out["pmid"] = None if dxy == 0 else math.log(dxy / (dx * dy / d))
        out["cpmid"] = None if dxy == 0 else math.log(dxy / (dx * dy / d + penalty_d))
        out["pmiz"] = None if z == 0 else math.log(z / (dx * dy / d))
        out["cpmiz"] = None if z == 0 else math.log(z / (dx * dy / d + penalty_d))
        if z == 0:
            out["csr"] = 0.0
        else:
            denom = ez + math.sqrt(st.k) * math.sqrt(math.log(delta) / -2.0)
            out["csr"] = math.inf if denom <= 0 else z / denom
        out["pmi2"] = None if fxy == 0 else math.log(fxy * fxy / (fx * fy))
        out["pmi2d"] = None if dxy == 0 else math.log(dxy * dxy / (dx * dy))
        out["npmi"] = (None if fxy == 0 or fxy >= w
                       else math.log(fxy / (fx * fy / w)) / math.log(w / fxy))
        out["npmid"] = (None if dxy == 0 or dxy >= d
                        else math.log(dxy / (dx * dy / d)) / math.log(d / dxy))
        out["dice"] = 2.0 * fxy / (fx + fy)
        out["jaccard"] = fxy / (fx + fy - fxy)

        n11, n12, n21, n22 = fxy, fx - fxy, fy - fxy, w - fx - fy + fxy
        row1, row2 = n11 + n12, n21 + n22
        col1, col2 = n11 + n21, n12 + n22
        total = n11 + n12 + n21 + n22
        chi2 = 0.0
        llr = 0.0
        for obs, row, col in ((n11, row1, col1), (n12, row1, col2),
                              (n21, row2, col1), (n22, row2, col2)):
            expected = row * col / total
            if expected > 0:
                diff = obs - expected
                chi2 += diff * diff / expected
            if obs > 0:
                p = obs / total
                llr += p * math.log(p / ((row / total) * (col / total)))
        out["chi2"] = chi2
        out["llr"] = llr

        if fxy <= 0 or fxy * (1.0 - fxy / w) <= 0:
            out["ttest"] = None
        else:
            out["ttest"] = (fxy - fx * fy / w) / math.sqrt(fxy * (1.0 - fxy / w))
        return out

    def test_criterion_1_formula_oracles(self):
        with criterion(1, "all 16 measures match straight-line formula oracles "
                          "on 1000 random count tuples (rel err <= 1e-12)"):
            rng = random.Random(20240801)
            for _ in range(1000):
                st = random_stats(rng)
                delta = rng.uniform(0.05, 0.95)
                z = rng.randint(0, st.dxy)
                ez = rng.uniform(0.0, z + 1.0)
                expected = self.oracles(st, delta, z, ez)
                config = MeasureConfig(s=st.s, delta=delta)
                for measure in MeasureId:
                    name = measure.value
                    if measure is MeasureId.PMIZ:
                        got = score_pmiz(st, z)
                    elif measure is MeasureId.CPMIZ:
                        got = score_cpmiz(st, z, delta)
                    elif measure is MeasureId.CSR:
                        got = score_csr(st, z, ez, delta)
                    else:
                        got = score_from_stats(measure, st, config)
                    assert_matches(got, expected[name])


# Reference 5-fold CV rank correlations for seven measures on the eight
# human gold datasets, and the deviation summary those correlations imply.
REFERENCE_CORRELATIONS = {
    "pmi": (0.22, 0.25, 0.35, 0.25, 0.27, 0.16, 0.69, 0.38),
    "cpmi": (0.23, 0.28, 0.40, 0.29, 0.29, 0.17, 0.70, 0.46),
    "pmid": (0.22, 0.26, 0.37, 0.26, 0.28, 0.17, 0.71, 0.42),
    "cpmid": (0.27, 0.32, 0.44, 0.33, 0.36, 0.16, 0.72, 0.54),
    "pmiz": (0.24, 0.26, 0.38, 0.26, 0.28, 0.18, 0.71, 0.39),
    "cpmiz": (0.27, 0.32, 0.44, 0.34, 0.35, 0.18, 0.71, 0.53),
    "csr": (0.25, 0.30, 0.42, 0.31, 0.34, 0.10, 0.63, 0.43),
}
REFERENCE_DATASETS = ("edinburgh", "florida", "kent", "minnesota",
                      "white_abrams", "goldfarb_halpern", "wordsim", "esslli")
REFERENCE_AVG_DEVIATION = {
    "pmi": 0.075, "cpmi": 0.044, "pmid": 0.060, "cpmid": 0.004,
    "pmiz": 0.059, "cpmiz": 0.004, "csr": 0.049,
}


class TestCriterion2:
    def test_criterion_2_average_deviation_reproduction(self):
        with criterion(2, "average_deviation on the reference 7x8 correlation "
                          "matrix reproduces all reference deviations +-0.0005"):
            matrix = {
                measure: dict(zip(REFERENCE_DATASETS, row))
                for measure, row in REFERENCE_CORRELATIONS.items()
            }
            deviations = average_deviation(matrix)
            assert set(deviations) == set(REFERENCE_AVG_DEVIATION)
            for measure, reference in REFERENCE_AVG_DEVIATION.items():
                assert abs(deviations[measure] - reference) <= 0.0005, (
                    f"{measure}: {deviations[measure]} vs {reference}"
                )
            # the two headline values, asserted on their own
            assert abs(deviations["pmi"] - 0.075) <= 0.0005
            assert abs(deviations["cpmid"] - 0.004) <= 0.0005


class TestCriterion3:
    def test_criterion_3_penalty_limit(self):
        with criterion(3, "delta=1 collapses each c-variant onto its base "
                          "measure exactly; ascent in delta is monotone"):
            rng = random.Random(31)
            deltas = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0 - 1e-9]
            for _ in range(100):
                st = random_stats(rng, min_fxy=1)
                z = rng.randint(1, st.dxy)
                pairs = [
                    (score_pmi(st).value, lambda d, s=st: score_cpmi(s, d).value),
                    (score_pmid(st).value, lambda d, s=st: score_cpmid(s, d).value),
                    (score_pmiz(st, z).value,
                     lambda d, s=st, z=z: score_cpmiz(s, z, d).value),
                ]
                for base, c_variant in pairs:
                    assert c_variant(1.0) == base
                    values = [c_variant(d) for d in deltas]
                    for lo, hi in zip(values, values[1:]):
                        assert lo < hi
                    assert values[-1] < base


class TestCriterion4:
    def test_criterion_4_corpus_scaling(self):
        with criterion(4, "scaling all word counts by n leaves PMI fixed "
                          "(<1e-12) and strictly increases cPMI"):
            rng = random.Random(41)
            for _ in range(100):
                st = random_stats(rng, min_fxy=1)
                delta = rng.uniform(0.05, 0.95)
                base_pmi = score_pmi(st).value
                base_cpmi = score_cpmi(st, delta).value
                for n in (2, 4, 8):
                    scaled = PairStatistics(
                        x="x", y="y", s=st.s, fxy=st.fxy * n, dxy=st.dxy, k=st.k,
                        fx=st.fx * n, fy=st.fy * n, dx=st.dx, dy=st.dy,
                        w=st.w * n, d=st.d,
                    )
                    assert abs(score_pmi(scaled).value - base_pmi) < 1e-12
                    assert score_cpmi(scaled, delta).value > base_cpmi


def exhaustive_max_disjoint(intervals):
    """Independent oracle: try every subset via include/exclude recursion,
    memoized on (position, last taken endpoint)."""
    ordered = sorted(intervals)
    memo = {}

    def best(i, last_end):
        if i == len(ordered):
            return 0
        key = (i, last_end)
        if key not in memo:
            lo, hi = ordered[i]
            take = 0
            if lo > last_end:
                take = 1 + best(i + 1, hi)
            memo[key] = max(take, best(i + 1, last_end))
        return memo[key]

    return best(0, -1)


class TestCriterion5:
    def test_criterion_5_greedy_matching(self):
        with criterion(5, "greedy non-overlapped matching equals an exhaustive "
                          "subset oracle on 1000 random documents"):
            rng = random.Random(51)
            checked = 0
            for _ in range(1000):
                length = rng.randint(2, 12)
                alphabet = "ab" + "cde"[: rng.randint(0, 3)]
                doc = [rng.choice(alphabet) for _ in range(length)]
                xs = [i for i, t in enumerate(doc) if t == "a"]
                ys = [i for i, t in enumerate(doc) if t == "b"]
                for span_limit in (None, 1, 3):
                    occurrences = enumerate_pair_occurrences(xs, ys, span_limit)
                    expected = exhaustive_max_disjoint(
                        [occ.interval for occ in occurrences]
                    )
                    assert max_nonoverlapped(occurrences) == expected
                    checked += 1
            assert checked == 3000


class TestCriterion6:
    def test_criterion_6_null_model(self):
        with criterion(6, "pi_exact(3,1,1,1) = 2/3 exactly; Monte Carlo at "
                          "100k samples within 3 binomial SE on >= 99% of keys"):
            assert pi_exact(PiKey(3, 1, 1, 1)) == 2.0 / 3.0
            config = NullModelConfig(mc_samples=100_000, rng_seed=61)
            keys = [
                PiKey(length, f, fhat, s)
                for length in range(2, 9)
                for f in range(1, min(2, length // 2) + 1)
                for fhat in range(0, f + 1)
                for s in range(1, 5)
            ]
            assert len(keys) == 116
            misses = 0
            for key in keys:
                exact = pi_exact(key)
                estimate = pi_monte_carlo(key, config)
                se = math.sqrt(exact * (1.0 - exact) / config.mc_samples)
                if se == 0.0:
                    assert estimate == exact
                elif abs(estimate - exact) > 3.0 * se:
                    misses += 1
            assert misses <= len(keys) // 100


class TestCriterion7:
    def test_criterion_7_significance_count_bounds(self):
        with criterion(7, "Z <= d(x,y) <= K <= min(d(x), d(y)) on 200 random "
                          "corpora; E(Z) <= eps*K under the exact null"):
            rng = random.Random(71)
            config = NullModelConfig(exact_cutoff=10)
            for _ in range(200):
                docs = [
                    [rng.choice("abc") for _ in range(rng.randint(2, 10))]
                    for _ in range(rng.randint(3, 6))
                ]
                index = build_index(docs)
                stats = pair_statistics(index, "a", "b", rng.randint(1, 4))
                epsilon = rng.choice((0.3, 0.5, 0.7))
                table = PiTable()
                z = compute_z(stats, epsilon, table, config)
                assert z <= stats.dxy <= stats.k <= min(stats.dx, stats.dy)
                ez = expected_z(stats, epsilon, table, config)
                assert ez <= epsilon * stats.k + 1e-12


class TestCriterion8:
    def test_criterion_8_rank_machinery(self):
        with criterion(8, "spearman is exactly +-1 on sorted/reversed input, "
                          "matches a quadratic tie oracle, and ranks Dice and "
                          "Jaccard identically"):
            rng = random.Random(81)

            # exact +-1.0 on co-sorted and anti-sorted vectors
            for _ in range(20):
                n = rng.randint(2, 500)
                xs = sorted(rng.uniform(-100, 100) for _ in range(n))
                while len(set(xs)) < n:
                    xs = sorted(rng.uniform(-100, 100) for _ in range(n))
                ys = sorted(rng.uniform(-5, 5) for _ in range(n))
                while len(set(ys)) < n:
                    ys = sorted(rng.uniform(-5, 5) for _ in range(n))
                assert spearman(xs, ys) == 1.0
                assert spearman(xs, list(reversed(ys))) == -1.0

            # tie handling against a brute-force rank-then-Pearson oracle
            def oracle_rank(values):
                return [
                    sum(1 for u in values if u < v)
                    + (sum(1 for u in values if u == v) + 1) / 2
                    for v in values
                ]

            def oracle_spearman(xs, ys):
                rx, ry = oracle_rank(xs), oracle_rank(ys)
                n = len(rx)
                mx, my = math.fsum(rx) / n, math.fsum(ry) / n
                cov = math.fsum((a - mx) * (b - my) for a, b in zip(rx, ry))
                vx = math.fsum((a - mx) ** 2 for a in rx)
                vy = math.fsum((b - my) ** 2 for b in ry)
                return cov / math.sqrt(vx * vy)

            done = 0
            while done < 500:
                n = rng.randint(3, 60)
                xs = [float(rng.randint(0, 8)) for _ in range(n)]
                ys = [float(rng.randint(0, 8)) for _ in range(n)]
                if len(set(xs)) < 2 or len(set(ys)) < 2:
                    continue
                assert abs(spearman(xs, ys) - oracle_spearman(xs, ys)) <= 1e-12
                done += 1

            # Dice and Jaccard always produce the same ranking
            for _ in range(20):
                tuples = [random_stats(rng) for _ in range(50)]
                dice = [score_dice(st).value for st in tuples]
                jaccard = [score_jaccard(st).value for st in tuples]
                if len(set(dice)) < 2:
                    continue
                assert spearman(dice, jaccard) == 1.0


PLANTED = ("alpha", "beta")
DECOYS = [(f"gamma{i}", f"delta{i}") for i in range(10)]
FILLERS = [f"w{i:03d}" for i in range(200)]


def build_planted_corpus(rng):
    """1000 length-100 documents. The planted pair co-occurs within 3 tokens
    in 300 documents; each decoy word appears in 300 documents too, but its
    partner only coincidentally nearby."""
    docs = [rng.choices(FILLERS, k=100) for _ in range(1000)]
    used = [set() for _ in range(1000)]

    for doc_id in range(300):
        pos = rng.randrange(0, 96)
        gap = rng.randint(1, 3)
        docs[doc_id][pos] = PLANTED[0]
        docs[doc_id][pos + gap] = PLANTED[1]
        used[doc_id].update({pos, pos + gap})

    for pair in DECOYS:
        for word in pair:
            for doc_id in rng.sample(range(1000), 300):
                slot = rng.randrange(100)
                while slot in used[doc_id]:
                    slot = rng.randrange(100)
                docs[doc_id][slot] = word
                used[doc_id].add(slot)
    return docs


def write_gold50(path):
    entries = [(PLANTED, 100.0)]
    entries += [(pair, 90.0 - i) for i, pair in enumerate(DECOYS)]
    entries += [((FILLERS[2 * j], FILLERS[2 * j + 1]), 70.0 - j) for j in range(39)]
    lines = [f"{a}\t{b}\t{score_}" for (a, b), score_ in entries]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    assert len(entries) == 50


@pytest.fixture(scope="module")
def planted(tmp_path_factory):
    root = tmp_path_factory.mktemp("planted")
    docs = build_planted_corpus(random.Random(1234))
    corpus_file = root / "corpus.txt"
    corpus_file.write_text(
        "\n\n".join(" ".join(doc) for doc in docs) + "\n", encoding="utf-8"
    )
    index_path = root / "corpus.idx"
    assert main(["index", "--corpus", str(corpus_file), "--format", "blankline",
                 "--out", str(index_path)]) == 0
    gold_path = root / "gold50.tsv"
    write_gold50(gold_path)
    return root, index_path, gold_path


class TestCriterion9:
    def test_criterion_9_end_to_end(self, planted):
        with criterion(9, "cPMId at defaults ranks the planted pair above all "
                          "matched-frequency decoys; twice-run 5-fold CV "
                          "reports are byte-identical"):
            root, index_path, gold_path = planted
            index = CorpusIndex.load(index_path)
            config = MeasureConfig(s=20, delta=0.7)
            planted_score = score(MeasureId.CPMID, PLANTED, index, config)
            assert planted_score.defined
            for decoy in DECOYS:
                decoy_score = score(MeasureId.CPMID, decoy, index, config)
                assert planted_score.value > decoy_score.value, decoy

            reports = []
            for name in ("run1.json", "run2.json"):
                report_path = root / name
                code = main([
                    "eval", "--index", str(index_path), "--gold", str(gold_path),
                    "--measures", "pmi,cpmid,csr", "--cv", "5", "--seed", "1",
                    "--grid", "s=5,20;delta=0.5,0.7;epsilon=0.3,0.5",
                    "--mc-samples", "2000", "--no-figures",
                    "--report", str(report_path),
                ])
                assert code == 0
                reports.append(report_path)

            first, second = reports
            assert first.read_bytes() == second.read_bytes()
            assert first.with_suffix(".txt").read_bytes() == \
                second.with_suffix(".txt").read_bytes()
            payload = json.loads(first.read_text(encoding="utf-8"))
            assert payload["errors"] == {}
            assert payload["datasets"] == ["gold50"]
            assert payload["k"] == 5
            for m in ("pmi", "cpmid", "csr"):
                assert m in payload["correlations"]
