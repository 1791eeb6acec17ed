import csv
import json
import math

import pytest

import paofed

SMALL = {
    "preset": "setting1",
    "K": 16,
    "N": 200,
    "D": 20,
    "test_size": 300,
    "seeds": [1, 2],
    "algorithms": ["PAO-Fed-U1", "Online-FedSGD"],
}


def test_preset_roundtrip():
    cfg = paofed.preset("setting2")
    assert cfg["async"]["delay_granularity"] == 10
    assert paofed.resolve(cfg) == cfg


def test_bad_config_names_field():
    with pytest.raises(paofed.ConfigError, match="K"):
        paofed.resolve(dict(SMALL, K=6))


def test_simulate_is_deterministic_and_learns():
    a = paofed.simulate(SMALL)
    b = paofed.simulate(json.dumps(SMALL))
    assert a == b
    assert set(a) == {"PAO-Fed-U1", "Online-FedSGD"}
    curve = a["Online-FedSGD"]
    assert curve["iteration"][0] == 0 and curve["iteration"][-1] == 200
    assert curve["mse_db_mean"][-1] < curve["mse_db_mean"][0] - 3


def test_seed_override():
    one = paofed.simulate(SMALL, seeds="1")
    two = paofed.simulate(SMALL, seeds="1,2")
    assert one["PAO-Fed-U1"]["mse_db_std"][-1] == 0.0
    assert two["PAO-Fed-U1"]["mse_db_std"][-1] > 0.0


def test_run_to_dir_writes_cli_outputs(tmp_path):
    files = paofed.run_to_dir(SMALL, tmp_path, title="smoke")
    assert len(files) == 2
    with open(files[0], newline="") as f:
        rows = list(csv.reader(f))
    assert ",".join(rows[0]) == paofed.CSV_HEADER
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert len(manifest["outputs"]) == 2
    figure = json.loads((tmp_path / "figure.json").read_text())
    assert figure["title"] == "smoke" and len(figure["curves"]) == 2


def test_mu_bound_verdicts():
    bound, lines = paofed.mu_bound(dict(SMALL, mu=0.5), samples_per_client=100)
    assert bound > 0
    assert len(lines) == 2 and all(l.startswith(("OK", "WARNING")) for l in lines)


def test_rff_map():
    rff = paofed.RffMap(4, 50, 1.0, 7)
    z = rff.map([0.1, -0.2, 0.3, 0.0])
    assert len(z) == 50
    assert all(abs(v) <= math.sqrt(2 / 50) + 1e-12 for v in z)
    assert all(0 <= b < 2 * math.pi for b in rff.phases)
    with pytest.raises(paofed.ParameterError):
        rff.map([1.0])


def test_masks():
    s = paofed.MaskScheduler(8, 2, 4, paofed.SharingMode.UNCOORDINATED)
    assert s.server_mask(0, 0) == [0, 1]
    assert s.server_mask(1, 0) == [2, 3]
    c = paofed.MaskScheduler(8, 2, 4, paofed.SharingMode.COORDINATED)
    assert c.server_mask(0, 3) == c.server_mask(3, 3)


def test_delays_and_mse():
    d = paofed.sample_delays("setting1", 20000, seed=1)
    frac = sum(x >= 1 for x in d) / len(d)
    assert abs(frac - 0.2) < 0.01
    assert paofed.mse_db_from_errors([0.1, 0.1]) == pytest.approx(-20.0)
    assert paofed.mse_db_from_errors([0.0]) == -math.inf
