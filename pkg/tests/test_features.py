"""Tests for feature extraction and matrix serialization."""

import io
import math

import numpy as np
import pytest

from benfraud.benford import fit_address
from benfraud.errors import SchemaError, ValidationError
from benfraud.features import (
    BENFORD_COLUMNS,
    FEATURE_COLUMNS,
    FeatureVector,
    LabeledExample,
    build_dataset,
    design_matrix,
    extract_features,
    read_matrix,
    write_matrix,
)
from benfraud.ingest import AddressLabel, NONSCAM, SCAM
from benfraud.txgraph import build_graph, neighborhood
from helpers import addr, record


def nbhd_of(records, address):
    return neighborhood(build_graph(records), address)


class TestExtractFeatures:
    def test_two_point_incoming_statistics(self):
        records = [
            record(1, addr(9), addr(1), 1, gas=21000),
            record(2, addr(8), addr(1), 3, gas=21000),
        ]
        fv = extract_features(nbhd_of(records, addr(1)))
        assert fv.get("in_tx_count") == 2.0
        assert fv.get("in_unique_counterparties") == 2.0
        assert fv.get("in_value_mean") == 2.0
        assert fv.get("in_value_median") == 2.0
        # Population std: sqrt(((1-2)^2 + (3-2)^2) / 2) = 1.
        assert fv.get("in_value_std") == 1.0
        assert fv.get("in_gas_std") == 0.0
        assert fv.get("out_tx_count") == 0.0
        assert math.isnan(fv.get("out_value_mean"))
        assert math.isnan(fv.get("out_gas_median"))

    def test_empty_neighborhood_is_counts_zero_rest_missing(self):
        fv = extract_features(nbhd_of([], addr(1)))
        assert fv.get("in_tx_count") == 0.0
        assert fv.get("out_tx_count") == 0.0
        for name in FEATURE_COLUMNS:
            if not name.endswith("tx_count") and not name.endswith("counterparties"):
                assert math.isnan(fv.get(name)), name

    def test_benford_block_uses_pooled_directions(self):
        records = [
            record(1, addr(9), addr(1), 12),
            record(2, addr(8), addr(1), 19),
            record(3, addr(1), addr(7), 230),
        ]
        fv = extract_features(nbhd_of(records, addr(1)))
        first, second = fit_address([12, 19, 230])
        assert fv.get("chi2_first") == first.chi_squared
        assert fv.get("chi2_second") == second.chi_squared
        assert fv.get("ks_first") == first.ks
        assert fv.get("ks_second") == second.ks

    def test_self_transfer_counts_twice_in_both_blocks(self):
        records = [record(1, addr(1), addr(1), 5), record(2, addr(1), addr(2), 7)]
        fv = extract_features(nbhd_of(records, addr(1)))
        assert fv.get("in_tx_count") + fv.get("out_tx_count") == 3.0
        first, _ = fit_address([5, 5, 7])
        assert fv.get("chi2_first") == first.chi_squared

    def test_zero_values_leave_benford_missing_but_counts_present(self):
        records = [record(1, addr(9), addr(1), 0), record(2, addr(1), addr(9), 0)]
        fv = extract_features(nbhd_of(records, addr(1)))
        assert fv.get("in_tx_count") == 1.0
        assert fv.get("out_tx_count") == 1.0
        for name in BENFORD_COLUMNS:
            assert math.isnan(fv.get(name))
        assert fv.get("in_value_mean") == 0.0

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        records = [
            record(
                i,
                addr(int(rng.integers(1, 5))),
                addr(1),
                int(rng.integers(1, 10**6)),
                gas=int(rng.integers(21000, 500000)),
                block=int(rng.integers(0, 1000)),
            )
            for i in range(30)
        ]
        base = extract_features(nbhd_of(records, addr(1)))
        for _ in range(5):
            shuffled = list(records)
            rng.shuffle(shuffled)
            assert extract_features(nbhd_of(shuffled, addr(1))) == base

    def test_log_uniform_address_fits_benford(self):
        rng = np.random.default_rng(21)
        lo, hi = math.log(10**2), math.log(10**8)
        records = [
            record(i, addr(9), addr(1), int(round(math.exp(u))), block=i)
            for i, u in enumerate(rng.uniform(lo, hi, size=10_000))
        ]
        fv = extract_features(nbhd_of(records, addr(1)))
        assert fv.get("chi2_first") < 0.01

    def test_benford_like_values_have_mean_above_median(self):
        rng = np.random.default_rng(33)
        lo, hi = math.log(10**2), math.log(10**8)
        records = [
            record(i, addr(9), addr(1), int(round(math.exp(u))), block=i)
            for i, u in enumerate(rng.uniform(lo, hi, size=5_000))
        ]
        fv = extract_features(nbhd_of(records, addr(1)))
        assert fv.get("in_value_mean") > fv.get("in_value_median")


class TestBuildDataset:
    def graph_and_labels(self):
        records = [
            record(1, addr(1), addr(2), 11),
            record(2, addr(2), addr(3), 27),
            record(3, addr(4), addr(5), 31),
        ]
        labels = {
            addr(1): AddressLabel(addr(1), SCAM, "a"),
            addr(2): AddressLabel(addr(2), NONSCAM, "b"),
            addr(3): AddressLabel(addr(3), NONSCAM, "c"),
        }
        return build_graph(records), labels

    def test_one_example_per_labeled_address_in_order(self):
        graph, labels = self.graph_and_labels()
        examples = build_dataset(graph, labels)
        assert [e.address for e in examples] == sorted(labels)
        assert [e.label for e in examples] == [SCAM, NONSCAM, NONSCAM]

    def test_unlabeled_graph_addresses_are_ignored(self):
        graph, labels = self.graph_and_labels()
        examples = build_dataset(graph, labels)
        assert addr(4) not in {e.address for e in examples}

    def test_label_absent_from_graph_warns_and_keeps_example(self):
        graph, labels = self.graph_and_labels()
        labels[addr(9)] = AddressLabel(addr(9), SCAM, "x")
        with pytest.warns(UserWarning, match="no transactions"):
            examples = build_dataset(graph, labels)
        assert len(examples) == 4
        ghost = next(e for e in examples if e.address == addr(9))
        assert ghost.features.get("in_tx_count") == 0.0
        assert math.isnan(ghost.features.get("chi2_first"))

    def test_zero_valued_history_warns_and_keeps_example(self):
        records = [record(1, addr(1), addr(2), 0)]
        labels = {addr(1): AddressLabel(addr(1), SCAM, "x")}
        with pytest.warns(UserWarning, match="no nonzero values"):
            examples = build_dataset(build_graph(records), labels)
        assert math.isnan(examples[0].features.get("chi2_first"))


class TestMatrixSerialization:
    def examples(self):
        records = [
            record(1, addr(1), addr(2), 11),
            record(2, addr(2), addr(3), 27),
            record(3, addr(3), addr(1), 0),
            record(4, addr(1), addr(4), 5),
        ]
        labels = {
            addr(1): AddressLabel(addr(1), SCAM, "a"),
            addr(2): AddressLabel(addr(2), NONSCAM, "b"),
            addr(3): AddressLabel(addr(3), NONSCAM, "c"),
            addr(4): AddressLabel(addr(4), NONSCAM, "d"),
        }
        return build_dataset(build_graph(records), labels)

    def test_round_trip_preserves_structures(self):
        examples = self.examples()
        out = io.BytesIO()
        write_matrix(examples, out)
        assert read_matrix(io.BytesIO(out.getvalue())) == examples

    def test_missing_marker_is_distinct_from_zero(self):
        examples = self.examples()
        out = io.BytesIO()
        write_matrix(examples, out)
        assert ",NA," in out.getvalue().decode()
        again = read_matrix(io.BytesIO(out.getvalue()))
        sink_only = next(e for e in again if e.address == addr(4))
        assert sink_only.features.get("out_tx_count") == 0.0
        assert math.isnan(sink_only.features.get("out_value_mean"))
        # A genuine zero (constant gas) still reads back as 0.0, not NA.
        assert again[0].features.get("in_gas_std") == 0.0

    def test_header_shape(self):
        out = io.BytesIO()
        write_matrix(self.examples(), out)
        header = out.getvalue().decode().splitlines()[0].split(",")
        assert header == ["address", *FEATURE_COLUMNS, "label"]
        assert len(header) == 22

    def test_missing_column_is_schema_error_naming_it(self):
        out = io.BytesIO()
        write_matrix(self.examples(), out)
        lines = out.getvalue().decode().splitlines()
        header_cells = lines[0].split(",")
        dropped = header_cells.index("ks_second")
        mangled = [
            ",".join(cells.split(",")[:dropped] + cells.split(",")[dropped + 1 :])
            for cells in lines
        ]
        stream = io.BytesIO(("\n".join(mangled) + "\n").encode())
        with pytest.raises(SchemaError, match="ks_second"):
            read_matrix(stream)

    def test_float_cells_round_trip_exactly(self):
        examples = self.examples()
        out = io.BytesIO()
        write_matrix(examples, out)
        again = read_matrix(io.BytesIO(out.getvalue()))
        for before, after in zip(examples, again):
            for b, a in zip(before.features.values, after.features.values):
                assert (math.isnan(b) and math.isnan(a)) or b == a


class TestDesignMatrix:
    def test_shapes_and_labels(self):
        examples = TestMatrixSerialization().examples()
        X, y, addresses = design_matrix(examples)
        assert X.shape == (4, 20)
        assert X.dtype == np.float64
        assert list(y) == [1, -1, -1, -1]
        assert addresses == [e.address for e in examples]

    def test_column_subset_selects_in_order(self):
        examples = TestMatrixSerialization().examples()
        X, _, _ = design_matrix(examples, columns=("chi2_second", "in_tx_count"))
        assert X.shape == (4, 2)
        assert X[0, 1] == examples[0].features.get("in_tx_count")

    def test_unknown_column_is_schema_error(self):
        with pytest.raises(SchemaError, match="third_digit"):
            design_matrix(TestMatrixSerialization().examples(), columns=("third_digit",))


class TestFeatureVectorValidation:
    def test_wrong_length_rejected(self):
        with pytest.raises(ValidationError):
            FeatureVector(values=(1.0,) * 19)

    def test_negative_chi2_rejected(self):
        values = [0.0] * 20
        values[FEATURE_COLUMNS.index("chi2_first")] = -0.5
        with pytest.raises(ValidationError):
            FeatureVector(values=tuple(values))

    def test_ks_above_one_rejected(self):
        values = [0.0] * 20
        values[FEATURE_COLUMNS.index("ks_first")] = 1.5
        with pytest.raises(ValidationError):
            FeatureVector(values=tuple(values))

    def test_label_domain_enforced(self):
        fv = FeatureVector(values=(0.0,) * 20)
        with pytest.raises(ValidationError):
            LabeledExample(address=addr(1), features=fv, label=0)
