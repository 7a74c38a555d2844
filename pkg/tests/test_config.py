import pytest

from pwll.config import load_run_spec, load_sweep_spec, parse_kv_file
from pwll.errors import ConfigError


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_parse_kv_basics(tmp_path):
    path = write(tmp_path, "# comment\na = 1\nb = two, three  # trailing\n\n")
    entries = parse_kv_file(path)
    assert entries["a"] == ("1", 2)
    assert entries["b"] == ("two, three", 3)


def test_parse_kv_rejects_bad_lines(tmp_path):
    path = write(tmp_path, "a = 1\nnot a pair\n")
    with pytest.raises(ConfigError) as err:
        parse_kv_file(path)
    assert "line 2" in str(err.value)


def test_parse_kv_rejects_duplicates(tmp_path):
    path = write(tmp_path, "a = 1\na = 2\n")
    with pytest.raises(ConfigError) as err:
        parse_kv_file(path)
    assert "line 2" in str(err.value)


def test_load_run_spec_full(tmp_path):
    path = write(tmp_path, """
dataset = blobs
dataset_seed = 3
k = 10
acquisition = unc-sm, unc-norm, unc-norm-decay
policy = argmax
tau = 8.0
tau0 = 16.0
K = 24
n_queries = 50
seeds = 0, 1, 2
initial_labeling = one-per-class
""")
    spec = load_run_spec(path)
    assert spec.presets == ("unc-sm", "unc-norm", "unc-norm-decay")
    assert len(spec.configs) == 3
    sm, norm, decay = spec.configs
    assert sm.acquisition == "margin" and sm.tau_mode == "zero"
    assert norm.acquisition == "norm" and norm.tau_mode == "fixed" and norm.tau == 8.0
    assert decay.tau_mode == "schedule" and decay.tau0 == 16.0 and decay.K == 24
    assert decay.seeds == (0, 1, 2)


def test_load_run_spec_rejects_bad_tau0_before_compute(tmp_path):
    path = write(tmp_path, "dataset = blobs\nacquisition = unc-norm-decay\ntau0 = -1\n")
    with pytest.raises(ConfigError) as err:
        load_run_spec(path)
    assert "tau0" in str(err.value)


def test_load_run_spec_rejects_unknown_keys(tmp_path):
    path = write(tmp_path, "dataset = blobs\nbogus_key = 7\n")
    with pytest.raises(ConfigError) as err:
        load_run_spec(path)
    assert "bogus_key" in str(err.value) and "line 2" in str(err.value)


def test_load_run_spec_rejects_unknown_preset(tmp_path):
    path = write(tmp_path, "dataset = blobs\nacquisition = vopt\n")
    with pytest.raises(ConfigError):
        load_run_spec(path)


def test_load_sweep_spec(tmp_path):
    path = write(tmp_path, """
mode = explore
rho = 1.0, 2.0
R_s = 2.0
beta = 0.25
tau = 0.6, 1.0
""", name="sweep.cfg")
    spec = load_sweep_spec(path)
    assert spec.mode == "explore"
    assert spec.rho == (1.0, 2.0)
    assert spec.tau == (0.6, 1.0)
    assert spec.delta_ratio == pytest.approx(1 / 32)


def test_load_sweep_spec_rejects_bad_density(tmp_path):
    path = write(tmp_path, "mode = explore\nplateau_fraction = 1.5\n", name="s.cfg")
    with pytest.raises(ConfigError):
        load_sweep_spec(path)
    path = write(tmp_path, "mode = explore\ndelta_ratio = -0.1\n", name="s2.cfg")
    with pytest.raises(ConfigError):
        load_sweep_spec(path)
    path = write(tmp_path, "mode = upside-down\n", name="s3.cfg")
    with pytest.raises(ConfigError):
        load_sweep_spec(path)
