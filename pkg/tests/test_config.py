import pytest

from qsv.config import DEFAULT_SEED, EPS_ALG_DEFAULT, EPS_MEMBER_DEFAULT, Tolerances, resolve_seed, tolerances_from_env
from qsv.errors import EXIT_INPUT, ConfigError


def test_defaults_are_an_order_apart():
    t = Tolerances()
    assert t.alg == EPS_ALG_DEFAULT == 1e-10
    assert t.member == EPS_MEMBER_DEFAULT == 1e-9
    assert t.max_dim == 16


def test_env_overrides(monkeypatch):
    monkeypatch.setenv("QSV_EPS_ALG", "1e-8")
    monkeypatch.setenv("QSV_EPS_MEMBER", "1e-6")
    monkeypatch.setenv("QSV_MAX_DIM", "8")
    t = tolerances_from_env()
    assert (t.alg, t.member, t.max_dim) == (1e-8, 1e-6, 8)


def test_blank_env_falls_back(monkeypatch):
    monkeypatch.setenv("QSV_EPS_ALG", "  ")
    assert tolerances_from_env().alg == EPS_ALG_DEFAULT


def test_bad_env_value_is_a_config_error(monkeypatch):
    monkeypatch.setenv("QSV_MAX_DIM", "lots")
    with pytest.raises(ConfigError) as ei:
        tolerances_from_env()
    assert ei.value.exit_code == EXIT_INPUT


@pytest.mark.parametrize("kwargs", [{"alg": 0.0}, {"member": -1e-9}, {"max_dim": 0}])
def test_invalid_tolerances_rejected(kwargs):
    with pytest.raises(ConfigError):
        Tolerances(**kwargs)


def test_with_overrides_keeps_unset_fields():
    t = Tolerances().with_overrides(member=1e-7)
    assert t.member == 1e-7
    assert t.alg == EPS_ALG_DEFAULT
    assert t.as_dict() == {"eps_alg": EPS_ALG_DEFAULT, "eps_member": 1e-7, "max_dim": 16}


def test_seed_precedence(monkeypatch):
    monkeypatch.delenv("QSV_SEED", raising=False)
    assert resolve_seed() == DEFAULT_SEED
    monkeypatch.setenv("QSV_SEED", "7")
    assert resolve_seed() == 7
    assert resolve_seed(99) == 99
