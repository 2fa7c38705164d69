import json
import math

import pytest

from lyricanchor.config import RunConfig, from_dict, load_config
from lyricanchor.errors import ConfigError


def test_defaults():
    c = RunConfig()
    assert (c.tau_silence_s, c.tau_max_s, c.n_anchor, c.n_segment, c.lm_order) == (0.8, 6.0, 5, 12, 20)
    assert (c.beam, c.retry_beam, c.pcs_tolerance_s) == (30.0, 300.0, 0.3)
    assert c.lm_backoff_penalty == pytest.approx(math.log(1e-4))
    assert c.vad().tau_silence_s == 0.8 and c.beams().retry_beam == 300.0 and c.segmenter().n_segment == 12


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown"):
        from_dict({"beam": 20, "bogus": 1})


@pytest.mark.parametrize("data", [
    {"beam": "wide"}, {"n_anchor": 2.5}, {"n_anchor": True}, {"ae_convention": 3}, {"g2p_rules": 7},
    {"beam": 400.0}, {"n_segment": 1}, {"tau_max_s": 0.5}, {"ae_convention": "end"}, {"jobs": 0},
    {"lm_backoff_penalty": 1.0}, {"hop_s": 0.05},
])
def test_invalid_values(data):
    with pytest.raises(ConfigError):
        from_dict(data)


def test_int_given_as_whole_float_is_accepted():
    assert from_dict({"n_segment": 14.0}).n_segment == 14


def test_roundtrip_and_override(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"beam": 20, "n_segment": 16}))
    c = load_config(p)
    assert c.beam == 20.0 and c.n_segment == 16 and c.n_anchor == 5
    d = c.updated(beam=25.0, n_anchor=None)
    assert d.beam == 25.0 and d.n_segment == 16 and d.n_anchor == 5
    assert from_dict(d.to_dict()) == d


def test_bad_files(tmp_path):
    (tmp_path / "a.json").write_text("[1, 2]")
    (tmp_path / "b.json").write_text("{broken")
    for name in ("a.json", "b.json", "missing.json"):
        with pytest.raises(ConfigError):
            load_config(tmp_path / name)
