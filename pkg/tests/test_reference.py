import shutil

import numpy as np
import pytest

from agrobio.reference import (FILES, ReferenceDataError, default_reference_dir, default_size_histogram,
                               interpolate_structural, load_reference_data)


@pytest.fixture
def ref_copy(tmp_path):
    dest = tmp_path / "ref"
    shutil.copytree(default_reference_dir(), dest)
    return dest


def test_fixtures_load_with_expected_lengths():
    ref, hist = load_reference_data(default_reference_dir())
    for name in ("biodiversity", "pesticide", "price_index", "yield"):
        assert len(ref[name]) == 32, name
        assert ref[name].years[-1] == 2021
    # census rows run to 2020 and are never extrapolated
    for name in ("farmer_count", "land_small", "land_medium", "land_large", "farm_size"):
        assert len(ref[name]) == 31, name
        assert ref[name].years[-1] == 2020
    for name in ref.names():
        assert ref[name].years[0] == 1990
        assert ref[name].provenance
    assert ref["price_index"].values[0] == pytest.approx(1.0)
    assert ref["biodiversity"].values[0] == pytest.approx(1.0)


def test_first_census_land_total():
    hist = default_size_histogram()
    assert sum(c.total_land for c in hist) == pytest.approx(1e7, rel=0.02)
    assert sum(c.count for c in hist) == pytest.approx(3e5, rel=0.02)


def test_negative_land_names_the_row(ref_copy):
    path = ref_copy / FILES["structural"][0]
    lines = path.read_text().splitlines()
    idx = next(i for i, l in enumerate(lines) if l and l[0].isdigit())
    cells = lines[idx].split(",")
    cells[-1] = "-5"
    lines[idx] = ",".join(cells)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ReferenceDataError, match=rf"structural.csv:{idx + 1}:"):
        load_reference_data(ref_copy)


def test_missing_file(ref_copy):
    (ref_copy / "yield.csv").unlink()
    with pytest.raises(ReferenceDataError, match="yield.csv"):
        load_reference_data(ref_copy)


def test_non_monotone_years(ref_copy):
    (ref_copy / "pesticide.csv").write_text("year,kg_per_ha\n1990,5\n1992,4.9\n1991,4.8\n")
    with pytest.raises(ReferenceDataError, match="pesticide.csv:4"):
        load_reference_data(ref_copy)


@pytest.mark.parametrize("body", ["year,index\n1990,abc\n", "year,index\n1990\n", "year,wrong\n1990,1\n", "year,index\n"])
def test_malformed_rows(ref_copy, body):
    (ref_copy / "price_index.csv").write_text(body)
    with pytest.raises(ReferenceDataError, match="price_index.csv"):
        load_reference_data(ref_copy)


def test_interpolation_examples():
    s = interpolate_structural([1990, 2000], [300000, 250000])
    assert s.values[s.years.tolist().index(1995)] == pytest.approx(275000)
    assert s.values[0] == 300000 and s.values[-1] == 250000
    years = np.array([1990, 2003, 2020])
    s = interpolate_structural(years, 10 + 2 * (years - 1990))
    assert np.allclose(s.values, 10 + 2 * (s.years - 1990))


def test_interpolation_does_not_extrapolate():
    s = interpolate_structural([1990, 2000], [1.0, 2.0], first=1980, last=2010)
    assert s.years[0] == 1990 and s.years[-1] == 2000
    with pytest.raises(ValueError):
        interpolate_structural([1990], [1.0])
    with pytest.raises(ValueError):
        interpolate_structural([2000, 1990], [1.0, 2.0])
