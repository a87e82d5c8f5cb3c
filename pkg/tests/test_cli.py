import numpy as np

from kaczmarz import cli
from kaczmarz.cli import main


def read(path):
    with open(path, "r", encoding="ascii") as fh:
        return fh.read()


def test_solve_zero_steps_single_row(tmp_path):
    out = tmp_path / "t.csv"
    rc = main(
        ["solve", "--kind", "laplacian_1d", "--n", "4", "--steps", "0",
         "--seed", "1", "--out", str(out)]
    )
    assert rc == 0
    lines = read(out).splitlines()
    assert lines[0] == "k,residual_norm,error_norm,iterate_norm"
    assert len(lines) == 2
    assert lines[1].startswith("0,")


def test_solve_rerun_bit_identical(tmp_path):
    args = ["solve", "--kind", "gaussian_row_normalized", "--n", "12",
            "--rhs", "from_solution", "--steps", "200", "--seed", "5",
            "--record-stride", "20"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert read(a) == read(b)


def test_solve_multiple_runs_have_suffixes(tmp_path):
    out = tmp_path / "trace.csv"
    rc = main(
        ["solve", "--kind", "laplacian_1d", "--n", "5", "--steps", "10",
         "--seed", "2", "--runs", "3", "--out", str(out)]
    )
    assert rc == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["trace_run0.csv", "trace_run1.csv", "trace_run2.csv"]


def test_missing_seed_is_usage_error(tmp_path, capsys):
    rc = main(["solve", "--kind", "laplacian_1d", "--n", "4", "--steps", "5",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 1
    assert "seed" in capsys.readouterr().err


def test_unknown_flag_is_usage_error():
    assert main(["solve", "--frobnicate"]) == 1


def test_unknown_diagnostic_is_config_error(tmp_path):
    rc = main(["solve", "--kind", "laplacian_1d", "--n", "4", "--steps", "5",
               "--seed", "1", "--diagnostics", "bogus", "--out", str(tmp_path / "x.csv")])
    assert rc == 1


def test_numeric_failure_exit_code(tmp_path):
    from kaczmarz.problems import save_matrix, save_vector

    save_matrix(tmp_path / "A.txt", np.eye(2))
    save_vector(tmp_path / "b.txt", np.ones(2))
    save_vector(tmp_path / "x0.txt", np.array([1e200, 1e200]))
    rc = main(
        ["solve", "--kind", "from_file", "--matrix-file", str(tmp_path / "A.txt"),
         "--rhs", "from_file", "--rhs-file", str(tmp_path / "b.txt"),
         "--x0", "from_file", "--x0-file", str(tmp_path / "x0.txt"),
         "--steps", "0", "--seed", "1", "--out", str(tmp_path / "t.csv")]
    )
    assert rc == 3


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "kind = laplacian_1d\n"
        "n = 6\n"
        "steps = 40\n"
        "seed = 9\n"
        "record_stride = 10\n"
        "# trailing comment line\n"
    )
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["solve", "--config", str(cfg), "--out", str(out1)]) == 0
    # flag wins over the config value
    assert main(["solve", "--config", str(cfg), "--seed", "10", "--out", str(out2)]) == 0
    assert read(out1) != read(out2)


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus = 3\n")
    assert main(["solve", "--config", str(cfg), "--seed", "1"]) == 1


def test_verify_theorem1_clean(tmp_path):
    out = tmp_path / "v.csv"
    rc = main(
        ["verify", "--kind", "gaussian_row_normalized", "--n", "20",
         "--rhs", "from_solution", "--steps", "50", "--seed", "3",
         "--record-stride", "10", "--theorem", "1", "--out", str(out)]
    )
    assert rc == 0
    header = read(out).splitlines()[0]
    assert header == (
        "k,residual_norm,error_norm,iterate_norm,"
        "thm1_lhs,thm1_rhs,thm1_identity_residual,thm1_decrement"
    )


def test_verify_identity_matrix_is_tight(tmp_path):
    from kaczmarz.problems import save_matrix, save_vector

    save_matrix(tmp_path / "A.txt", np.eye(5))
    save_vector(tmp_path / "b.txt", np.full(5, 2.0))
    out = tmp_path / "v.csv"
    rc = main(
        ["verify", "--kind", "from_file", "--matrix-file", str(tmp_path / "A.txt"),
         "--rhs", "from_file", "--rhs-file", str(tmp_path / "b.txt"),
         "--steps", "6", "--seed", "2", "--record-stride", "2",
         "--theorem", "1", "--out", str(out)]
    )
    assert rc == 0
    lines = read(out).splitlines()
    cols = lines[0].split(",")
    i_lhs, i_rhs = cols.index("thm1_lhs"), cols.index("thm1_rhs")
    for line in lines[1:]:
        cells = [float(v) for v in line.split(",")]
        assert abs(cells[i_lhs] - cells[i_rhs]) <= 1e-12 * max(1.0, abs(cells[i_rhs]))


def test_verify_theorem2_multiple_powers(tmp_path):
    out = tmp_path / "v.csv"
    rc = main(
        ["verify", "--kind", "symmetric_gaussian", "--n", "10",
         "--rhs", "from_solution", "--steps", "30", "--seed", "4",
         "--record-stride", "10", "--theorem", "2", "--ell", "1", "2", "3",
         "--out", str(out)]
    )
    assert rc == 0
    header = read(out).splitlines()[0]
    for ell in (1, 2, 3):
        assert f"thm2_l{ell}_lhs" in header


def test_verify_theorem2_needs_symmetry():
    rc = main(
        ["verify", "--kind", "gaussian_row_normalized", "--n", "8",
         "--rhs", "from_solution", "--steps", "10", "--seed", "3",
         "--theorem", "2"]
    )
    assert rc == 1


def test_verify_violation_exit_code(tmp_path, monkeypatch):
    # force an impossible tolerance so the plumbing reports exit code 2
    monkeypatch.setattr(cli, "INEQUALITY_TOL", -1e6)
    rc = main(
        ["verify", "--kind", "gaussian_row_normalized", "--n", "8",
         "--rhs", "from_solution", "--steps", "10", "--seed", "3",
         "--record-stride", "5", "--theorem", "1"]
    )
    assert rc == 2


def test_montecarlo_aggregate(tmp_path):
    out = tmp_path / "mc.csv"
    rc = main(
        ["montecarlo", "--kind", "gaussian_row_normalized", "--n", "10",
         "--rhs", "from_solution", "--steps", "60", "--seed", "11",
         "--runs", "8", "--record-stride", "20", "--out", str(out)]
    )
    assert rc == 0
    lines = read(out).splitlines()
    assert lines[0].startswith(
        "k,residual_norm_mean,residual_norm_std,residual_norm_min,residual_norm_max"
    )
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    mean, std, lo, hi = data[:, 1], data[:, 2], data[:, 3], data[:, 4]
    assert np.all(std >= 0.0)
    assert np.all(lo <= mean + 1e-15) and np.all(mean <= hi + 1e-15)


def test_montecarlo_mean_matches_solve_runs(tmp_path):
    common = ["--kind", "gaussian_row_normalized", "--n", "8", "--rhs", "from_solution",
              "--steps", "40", "--seed", "13", "--runs", "5", "--record-stride", "10"]
    mc = tmp_path / "mc.csv"
    tr = tmp_path / "tr.csv"
    assert main(["montecarlo", *common, "--out", str(mc)]) == 0
    assert main(["solve", *common, "--out", str(tr)]) == 0
    runs = []
    for j in range(5):
        lines = read(tmp_path / f"tr_run{j}.csv").splitlines()[1:]
        runs.append([float(line.split(",")[1]) for line in lines])
    expected_mean = np.mean(np.array(runs), axis=0)
    got = np.array(
        [float(line.split(",")[1]) for line in read(mc).splitlines()[1:]]
    )
    assert np.max(np.abs(got - expected_mean)) <= 1e-12 * max(1.0, expected_mean.max())


def test_montecarlo_needs_two_runs(tmp_path):
    rc = main(
        ["montecarlo", "--kind", "laplacian_1d", "--n", "4", "--steps", "5",
         "--seed", "1", "--runs", "1", "--out", str(tmp_path / "x.csv")]
    )
    assert rc == 1


def test_montecarlo_identical_traces_zero_std():
    from kaczmarz.cli import aggregate_traces
    from kaczmarz.problems import ProblemSpec, build_problem
    from kaczmarz.solver import run

    p = build_problem(ProblemSpec(kind="laplacian_1d", n=4, rhs="ones"))
    tr = run(p, 20, seed=5, record_stride=5)
    ks, stats = aggregate_traces([tr, tr], ["residual_norm"])
    mean, std, lo, hi = stats["residual_norm"]
    assert np.all(std == 0.0)
    assert np.array_equal(mean, lo) and np.array_equal(mean, hi)


def test_reproduce_needs_seed_and_out(tmp_path):
    assert main(["reproduce", "--figure", "fig1", "--out", str(tmp_path)]) == 1
    assert main(["reproduce", "--figure", "fig1", "--seed", "1"]) == 1


def test_reproduce_fig2_normalized_column(tmp_path):
    rc = main(["reproduce", "--figure", "fig2", "--seed", "6", "--steps", "300",
               "--out", str(tmp_path)])
    assert rc == 0
    lines = read(tmp_path / "fig2.csv").splitlines()
    assert lines[0].endswith(",v1_normalized")
    vals = np.array([float(line.split(",")[-1]) for line in lines[1:]])
    assert np.all(vals >= -1.0) and np.all(vals <= 1.0)


def test_reproduce_fig3_decrement_column(tmp_path):
    rc = main(["reproduce", "--figure", "fig3", "--seed", "6", "--steps", "40",
               "--runs", "5", "--out", str(tmp_path)])
    assert rc == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == [f"fig3_run{j}.csv" for j in range(5)]
    lines = read(tmp_path / "fig3_run0.csv").splitlines()
    assert lines[0].endswith(",decrement")
    # early decrements predict decay on a fresh instance
    first = float(lines[1].split(",")[-1])
    assert first < 0.0


def test_reproduce_rerun_bit_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["reproduce", "--figure", "fig2", "--seed", "9", "--steps", "100",
                     "--out", str(out)]) == 0
    assert read(a / "fig2.csv") == read(b / "fig2.csv")


def test_csv_float_format_round_trips():
    from kaczmarz.cli import format_value

    vals = [1.0 / 3.0, 1e-300, 123456.789, 2.0**-52]
    for v in vals:
        assert float(format_value(v)) == v
    assert format_value(7) == "7"
