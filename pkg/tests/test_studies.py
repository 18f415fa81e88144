import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from published import LT, REF_PVALUES, matches
from replisure.errors import DomainError, IngestionError
from replisure.studies import (
    CSV_COLUMNS,
    Dataset,
    Design,
    StudyEffect,
    StudyPair,
    load_dataset,
    normalize_pair,
    p_to_z,
    parse_dataset,
    se_from_ci,
    z_to_p,
)

Z975 = 1.959963984540054
HEADER = ",".join(CSV_COLUMNS)


def csv_text(*rows):
    return "\n".join([HEADER, *rows]) + "\n"


class TestSeFromCi:
    def test_triton_rct(self):
        assert se_from_ci(0.73, 0.90, 0.95) == pytest.approx(0.05340665, abs=1e-4)

    def test_dapa_rwe(self):
        assert se_from_ci(0.52, 1.26, 0.95) == pytest.approx(0.22577920, abs=1e-3)

    def test_degenerate(self):
        with pytest.raises(DomainError):
            se_from_ci(math.e, math.e)

    def test_reversed(self):
        with pytest.raises(DomainError):
            se_from_ci(0.9, 0.7)

    @given(st.floats(-3, 3), st.floats(1e-3, 2))
    def test_round_trip(self, theta, se):
        eff = StudyEffect(math.exp(theta), math.exp(theta - Z975 * se), math.exp(theta + Z975 * se))
        assert eff.se == pytest.approx(se, abs=1e-12, rel=1e-10)


class TestPZ:
    def test_zero(self):
        assert z_to_p(0.0) == 0.5

    def test_two_point_five_percent(self):
        assert p_to_z(0.025) == pytest.approx(Z975, abs=1e-9)

    def test_triton_original(self):
        assert z_to_p(3.946) == pytest.approx(3.973380665e-5, rel=1e-8)

    @pytest.mark.parametrize("p", [0.0, 1.0, 2.0])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            p_to_z(p)

    @given(st.floats(1e-10, 1 - 1e-10))
    def test_inverse(self, p):
        assert z_to_p(p_to_z(p)) == pytest.approx(p, abs=1e-10)


class TestStudyTypes:
    def test_hr_outside_ci(self):
        with pytest.raises(DomainError):
            StudyEffect(1.5, 0.8, 1.2)

    def test_superiority_margin(self):
        e = StudyEffect(0.8, 0.7, 0.9)
        with pytest.raises(DomainError):
            StudyPair("x", Design.SUPERIORITY, 1.3, e, e)

    def test_ni_margin(self):
        e = StudyEffect(0.8, 0.7, 0.9)
        with pytest.raises(DomainError):
            StudyPair("x", "ni", 1.0, e, e)

    def test_immutable(self):
        e = StudyEffect(0.8, 0.7, 0.9)
        with pytest.raises(AttributeError):
            e.hr = 0.5

    def test_duplicate_labels(self):
        e = StudyEffect(0.8, 0.7, 0.9)
        p = StudyPair("x", "sup", 1.0, e, e)
        with pytest.raises(DomainError):
            Dataset((p, p))


class TestNormalizePair:
    def test_tecos(self, dataset):
        n = normalize_pair(dataset["TECOS"])
        assert n.z_o == pytest.approx(5.18, abs=0.01)
        assert n.p_o < 1e-4

    def test_dapa_variance_ratio(self, dataset):
        assert normalize_pair(dataset["DAPA-CKD"]).c == pytest.approx(0.152, abs=0.002)

    def test_pronounce_wrong_direction(self, dataset):
        assert normalize_pair(dataset["PRONOUNCE"]).z_o < 0

    def test_invariants(self, dataset):
        for pair in dataset:
            n = normalize_pair(pair)
            assert n.c == pytest.approx(n.se_o**2 / n.se_r**2, rel=1e-14)
            assert n.z_o == pytest.approx((n.delta - n.theta_o) / n.se_o, rel=1e-14)
            assert n.delta == pytest.approx(math.log(pair.margin_hr))

    @given(st.floats(0.2, 5.0))
    def test_scale_consistency(self, k):
        o = StudyEffect(0.81, 0.73, 0.90)
        r = StudyEffect(0.88, 0.79, 0.97)
        base = normalize_pair(StudyPair("t", "sup", 1.0, o, r))
        scaled = StudyPair(
            "t", "sup", 1.0,
            StudyEffect(o.hr * k, o.ci_lo * k, o.ci_hi * k),
            StudyEffect(r.hr * k, r.ci_lo * k, r.ci_hi * k),
        )
        moved = normalize_pair(scaled, log_margin=math.log(k))
        for attr in ("z_o", "z_r", "c"):
            assert getattr(moved, attr) == pytest.approx(getattr(base, attr), abs=1e-12)

    def test_one_sided_p_match_reference(self, dataset):
        for pair in dataset:
            n = normalize_pair(pair)
            p_o, p_r = REF_PVALUES[pair.label][:2]
            assert matches(n.p_o, p_o), pair.label
            assert matches(n.p_r, p_r), pair.label

    def test_lt_entries_below_one_per_mille(self, dataset):
        for pair in dataset:
            n = normalize_pair(pair)
            for value, pub in zip((n.p_o, n.p_r), REF_PVALUES[pair.label][:2]):
                if pub == LT:
                    assert value < 1e-3


class TestLoadDataset:
    def test_bundled_size(self, dataset):
        assert len(dataset) == 29

    def test_design_split(self, dataset):
        designs = [p.design for p in dataset]
        assert designs.count(Design.NON_INFERIORITY) == 18
        assert designs.count(Design.SUPERIORITY) == 11

    def test_medicare_flags(self, dataset):
        absent = {p.label for p in dataset if not p.medicare_available}
        assert absent == {
            "TRITON-TIMI", "PLATO", "TRANSCEND", "ON-TARGET", "HORIZON-PIVOTAL",
            "P04334", "D5896", "IMPACT", "POET-COPD", "INSPIRE",
        }

    def test_order_preserved(self, dataset):
        assert dataset.labels[:2] == ["LEADER", "DECLARE"]
        assert dataset.labels[-1] == "PRONOUNCE"

    def test_ci_reversed_names_row(self):
        text = csv_text(
            "A,sup,1.00,0.8,0.7,0.9,0.8,0.7,0.9,true",
            "B,sup,1.00,0.8,0.95,0.7,0.8,0.7,0.9,false",
        )
        with pytest.raises(IngestionError) as err:
            parse_dataset(text)
        assert err.value.row == 2
        assert "row 2" in str(err.value)

    def test_missing_column(self):
        with pytest.raises(IngestionError, match="rwe_hi"):
            parse_dataset("label,design,margin_hr,rct_hr,rct_lo,rct_hi,rwe_hr,rwe_lo,medicare_available\n")

    @pytest.mark.parametrize("row, column", [
        ("A,sup,1.00,-0.8,0.7,0.9,0.8,0.7,0.9,true", "rct_hr"),
        ("A,ni,0.90,0.8,0.7,0.9,0.8,0.7,0.9,true", "margin_hr"),
        ("A,xx,1.00,0.8,0.7,0.9,0.8,0.7,0.9,true", "design"),
        ("A,sup,1.00,0.8,0.7,0.9,0.8,0.7,0.9,maybe", "medicare_available"),
        ("A,sup,1.00,0.8,0.7,0.9,abc,0.7,0.9,true", "rwe_hr"),
    ])
    def test_bad_fields(self, row, column):
        with pytest.raises(IngestionError) as err:
            parse_dataset(csv_text(row))
        assert err.value.column == column

    def test_duplicate_label(self):
        row = "A,sup,1.00,0.8,0.7,0.9,0.8,0.7,0.9,true"
        with pytest.raises(IngestionError, match="duplicate"):
            parse_dataset(csv_text(row, row))

    def test_from_path(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text(csv_text("A,ni,1.5,0.8,0.7,0.9,0.8,0.7,0.9,true"))
        data = load_dataset(f)
        assert data.labels == ["A"]
        assert data["A"].design is Design.NON_INFERIORITY

    def test_env_override(self, tmp_path, monkeypatch):
        f = tmp_path / "d.csv"
        f.write_text(csv_text("ONLY,sup,1.0,0.8,0.7,0.9,0.8,0.7,0.9,false"))
        monkeypatch.setenv("REPLISURE_DATA", str(f))
        assert load_dataset("bundled").labels == ["ONLY"]

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_dataset(tmp_path / "nope.csv")
