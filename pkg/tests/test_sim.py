import math

import pytest

from qcss.sim import (CSV_COLUMNS, FerCurve, FerRecord, NoCrossingError,
                      combine_records, estimate_threshold, read_csv,
                      run_trials, sweep, wilson_interval, write_csv)


class TestWilson:
    def test_no_failures(self):
        lo, hi = wilson_interval(0, 100)
        assert lo == 0.0 and 0 < hi < 0.05

    def test_known_value(self):
        # k=5, n=100, z=1.96: center and half-width of the score interval
        z = 1.959963984540054
        lo, hi = wilson_interval(5, 100)
        denom = 1 + z * z / 100
        center = (0.05 + z * z / 200) / denom
        half = z * math.sqrt(0.05 * 0.95 / 100 + z * z / 40000) / denom
        assert lo == pytest.approx(center - half, abs=1e-12)
        assert hi == pytest.approx(center + half, abs=1e-12)

    def test_empty(self):
        assert wilson_interval(0, 0) == (0.0, 1.0)


class TestRunTrials:
    def test_zero_noise(self, small_code):
        rec = run_trials(small_code, 0.0, trials=20, base_seed=0)
        assert rec.failures == 0 and rec.fer == 0.0
        assert rec.mean_iters == 1.0
        assert rec.false_successes == 0

    def test_worker_independence(self, small_code):
        kw = dict(p_d=0.06, trials=60, base_seed=3, max_iter=25, chunk_size=20)
        r1 = run_trials(small_code, workers=1, **kw)
        r2 = run_trials(small_code, workers=2, **kw)
        assert r1.csv_row() == r2.csv_row()

    def test_deterministic(self, small_code):
        r1 = run_trials(small_code, 0.06, trials=40, base_seed=9, max_iter=20)
        r2 = run_trials(small_code, 0.06, trials=40, base_seed=9, max_iter=20)
        assert r1.csv_row() == r2.csv_row()

    def test_failure_budget_stops_on_chunk_boundary(self, small_code):
        rec = run_trials(small_code, 0.30, trials=1000, base_seed=1,
                         max_iter=5, max_failures=5, chunk_size=10)
        assert rec.failures >= 5
        assert rec.trials < 1000 and rec.trials % 10 == 0

    def test_undetected_accounting(self, small_code):
        rec = run_trials(small_code, 0.25, trials=150, base_seed=4, max_iter=12)
        assert 0 <= rec.undetected_failures <= rec.failures
        assert rec.false_successes == 0
        assert rec.fer == rec.failures / rec.trials

    def test_block_continuation_matches_monolithic(self, small_code):
        whole = run_trials(small_code, 0.08, trials=80, base_seed=6, max_iter=15)
        a = run_trials(small_code, 0.08, trials=50, base_seed=6, max_iter=15)
        b = run_trials(small_code, 0.08, trials=30, base_seed=6, max_iter=15,
                       start_trial=50)
        merged = combine_records([a, b])
        assert (merged.trials, merged.failures, merged.undetected_failures) == (
            whole.trials, whole.failures, whole.undetected_failures)
        assert merged.fer == whole.fer
        assert merged.mean_iters == pytest.approx(whole.mean_iters, abs=1e-12)

    def test_combine_rejects_mixed_points(self, small_code):
        a = run_trials(small_code, 0.08, trials=10, base_seed=6, max_iter=15)
        b = run_trials(small_code, 0.10, trials=10, base_seed=6, max_iter=15)
        with pytest.raises(ValueError):
            combine_records([a, b])


class TestCurveCsv:
    def test_round_trip(self, small_code, tmp_path):
        curve = sweep(small_code, [0.02, 0.05], trials=10, base_seed=0, max_iter=10)
        path = tmp_path / "curve.csv"
        write_csv(path, curve, header_comments=["unit test"])
        back = read_csv(path)
        assert len(back) == 2
        for a, b in zip(curve, back):
            assert a.csv_row() == b.csv_row()

    def test_sweep_streams_csv(self, small_code, tmp_path):
        path = tmp_path / "s.csv"
        curve = sweep(small_code, [0.03], trials=5, base_seed=0, max_iter=10,
                      out_path=path, header_comments=["cfg"])
        text = path.read_text()
        assert text.startswith("# cfg\n" + ",".join(CSV_COLUMNS))
        assert len(curve) == 1

    def test_sweep_point_matches_run_trials(self, small_code):
        curve = sweep(small_code, [0.04], trials=15, base_seed=5, max_iter=10)
        rec = run_trials(small_code, 0.06, trials=15, base_seed=5, max_iter=10)
        assert curve.records[0].csv_row() == rec.csv_row()

    def test_grid_must_increase(self):
        curve = FerCurve()
        curve.append(_fake_record(0.02, 1e-2, 128))
        with pytest.raises(ValueError):
            curve.append(_fake_record(0.02, 1e-3, 128))

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError, match="header"):
            read_csv(path)


def _fake_record(f_m, fer, P, trials=10000):
    failures = max(1, int(round(fer * trials))) if fer > 0 else 0
    lo, hi = wilson_interval(failures, trials)
    return FerRecord(code_id=f"fake_P{P}", e=8, P=P, L=8, rate=0.5,
                     p_d=1.5 * f_m, f_m=f_m, trials=trials, failures=failures,
                     undetected_failures=0, fer=fer,
                     fer_ci_lo=lo, fer_ci_hi=hi, mean_iters=5.0, max_iter=90,
                     seed=0)


def _synthetic_curve(P, slope, root, grid):
    # log10 FER = slope * (f - root) - 3; the offset keeps FER below one
    # so the piecewise-linear model holds exactly on the whole grid
    curve = FerCurve()
    for f in grid:
        curve.append(_fake_record(f, 10.0 ** (slope * (f - root) - 3.0), P,
                                  trials=10**6))
    return curve


class TestThreshold:
    def test_exact_linear_crossing(self):
        grid = [0.030, 0.040, 0.060, 0.070]
        c1 = _synthetic_curve(128, slope=20.0, root=0.05, grid=grid)
        c2 = _synthetic_curve(1024, slope=60.0, root=0.05, grid=grid)
        est = estimate_threshold([c1, c2])
        assert est.f_star == pytest.approx(0.05, abs=1e-9)
        assert est.bracket[0] <= 0.05 <= est.bracket[1]
        assert est.P_pair == (128, 1024)

    def test_uses_two_largest(self):
        grid = [0.030, 0.040, 0.060, 0.070]
        c0 = _synthetic_curve(32, slope=10.0, root=0.02, grid=grid)
        c1 = _synthetic_curve(128, slope=20.0, root=0.05, grid=grid)
        c2 = _synthetic_curve(1024, slope=60.0, root=0.05, grid=grid)
        est = estimate_threshold([c2, c0, c1])
        assert est.P_pair == (128, 1024)
        assert est.f_star == pytest.approx(0.05, abs=1e-9)

    def test_identical_curves_no_crossing(self):
        grid = [0.03, 0.04, 0.05]
        c1 = _synthetic_curve(128, 20.0, 0.05, grid)
        c2 = _synthetic_curve(1024, 20.0, 0.05, grid)
        with pytest.raises(NoCrossingError):
            estimate_threshold([c1, c2])

    def test_validation(self):
        with pytest.raises(ValueError):
            estimate_threshold([_synthetic_curve(128, 20.0, 0.05, [0.03, 0.04])])
