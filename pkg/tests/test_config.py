import pytest

from varjump.config import EXPERIMENTS, ConfigError, defaults_for, parse_config


def test_minimal_config_fills_defaults():
    cfg = parse_config("[experiment]\nname = jump-sweep\n")
    assert cfg == defaults_for("jump-sweep")
    echo = cfg.echo()
    assert echo["experiment"] == "jump-sweep" and echo["N"] == cfg.N and echo["params"] == dict(sorted(cfg.params.items()))


def test_name_from_caller():
    cfg = parse_config("[grid]\nN = 64\n", "cz-check")
    assert cfg.experiment == "cz-check" and cfg.N == 64


def test_all_experiments_have_defaults():
    for name in EXPERIMENTS:
        assert defaults_for(name).experiment == name
    with pytest.raises(ConfigError):
        defaults_for("nope")


def test_overrides_and_params():
    text = """
# comment
[experiment]
name = jsw-compare
trials = 20
seed = 3
[sweep]
lambdas = 0.1, 0.2
[params]
bound = 4
"""
    cfg = parse_config(text)
    assert (cfg.trials, cfg.seed, cfg.lambdas) == (20, 3, (0.1, 0.2))
    assert cfg.param("bound") == 4


def test_power_of_two_error_has_line():
    with pytest.raises(ConfigError) as e:
        parse_config("[experiment]\nname = cz-check\n[grid]\nN = 100\n")
    assert any("line 4" in m and "power of two" in m for m in e.value.errors)


def test_duplicate_key_reports_both_lines():
    with pytest.raises(ConfigError) as e:
        parse_config("[experiment]\nname = cz-check\ntrials = 3\ntrials = 4\n")
    assert any("line 4" in m and "first set on line 3" in m for m in e.value.errors)


@pytest.mark.parametrize("text, needle", [
    ("[experiment]\nname = cz-check\n[grid]\nwidth = 3\n", "unknown key"),
    ("[experiment]\nname = cz-check\n[params]\nfoo = 1\n", "unknown parameter"),
    ("[experiment]\nname = cz-check\n[bogus]\n", "unknown section"),
    ("[experiment]\nname = cz-check\n[grid]\nN = abc\n", "bad value"),
    ("[experiment]\nname = jump-sweep\n[sweep]\nlambdas = 0.1, -1\n", "line 4"),
    ("[experiment]\nname = jump-sweep\n[sweep]\np = 1\n", "line 4"),
    ("[experiment]\nname = jump-sweep\n[kernel]\nspec = wibble\n", "line 4"),
    ("name = x\n", "outside any section"),
    ("[grid]\nN = 64\n", "missing [experiment] name"),
])
def test_errors(text, needle):
    with pytest.raises(ConfigError) as e:
        parse_config(text)
    assert any(needle in m for m in e.value.errors), e.value.errors


def test_errors_are_collected():
    with pytest.raises(ConfigError) as e:
        parse_config("[experiment]\nname = cz-check\n[grid]\nN = 100\nn = 3\n")
    assert len(e.value.errors) >= 2
