import pytest

from rmtlab.config import grid_axis, normalize_key, parse_config_text, parse_float_list, parse_grid, parse_int_list, read_config
from rmtlab.errors import InvalidParameterError


def test_parse_config_text():
    text = """
    # comment
    potential = quartic:1,-2
    L = 0.5
    n-list = 20, 40, 80
    N = 12.5
    n = 10
    Cache_Dir = /tmp/x
    """
    cfg = parse_config_text(text)
    assert cfg == {
        "potential": "quartic:1,-2",
        "L": "0.5",
        "n_list": "20, 40, 80",
        "big_n": "12.5",
        "n": "10",
        "cache_dir": "/tmp/x",
    }


def test_normalize_key():
    assert normalize_key("N") == "big_n"
    assert normalize_key("l") == "L"
    assert normalize_key("X-Ref") == "x_ref"


@pytest.mark.parametrize("text", ["potential gaussian", "colour = red"])
def test_bad_lines(text):
    with pytest.raises(InvalidParameterError, match=":1:"):
        parse_config_text(text)


def test_read_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("s = 1.5\nwhich = crit\n")
    assert read_config(path) == {"s": "1.5", "which": "crit"}


def test_lists():
    assert parse_int_list("20, 40 80") == (20, 40, 80)
    assert parse_float_list("0.5,-1") == (0.5, -1.0)
    with pytest.raises(InvalidParameterError):
        parse_int_list("20, x")
    with pytest.raises(InvalidParameterError):
        parse_float_list("1, two")


def test_grids():
    g = parse_grid("-1:1:3")
    assert len(g) == 9 and g[0] == (-1.0, -1.0) and g[4] == (0.0, 0.0)
    assert parse_grid("0 0; 1 -1;") == ((0.0, 0.0), (1.0, -1.0))
    assert grid_axis("0:1:5") == (0.0, 0.25, 0.5, 0.75, 1.0)
    for bad in ("1:2", "0 1 2", "a:b:c"):
        with pytest.raises(InvalidParameterError):
            parse_grid(bad)
    with pytest.raises(InvalidParameterError):
        grid_axis("0 1")
