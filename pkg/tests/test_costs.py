import math
from fractions import Fraction as F

import pytest

from activol import blocknet as bn
from activol import costs as c
from activol.costs import CostConstants, WeightPair

# symbolic conformance is checked at several exact constant pairs (quarters)
CONST_PAIRS = [
    CostConstants(),  # 25 / 35 blocks
    CostConstants(c_t=F(0), c_ccz=F(0)),
    CostConstants(c_t=F(4), c_ccz=F(4)),
    CostConstants(c_t=F(401), c_ccz=F(273)),  # non-integral block values
]


def vb(summary):
    return summary.volume_blocks


class TestWeights:
    def test_plain_strings(self):
        assert c.weights_of("XZ") == WeightPair(1, 1)
        assert c.weights_of("ZZZZ") == WeightPair(0, 4)
        assert c.weights_of("XXZZ") == WeightPair(2, 2)

    def test_y_increases_both(self):
        assert c.weights_of("YY") == WeightPair(2, 2)

    def test_odd_y_catalyst_rule(self):
        assert c.weights_of("Y") == WeightPair(2, 2)
        assert c.weights_of("XZY") == WeightPair(3, 3)

    def test_identity_rejected(self):
        with pytest.raises(ValueError):
            c.weights_of("II")
        with pytest.raises(ValueError):
            c.weights_of("")

    def test_bad_character(self):
        with pytest.raises(ValueError):
            c.weights_of("XQ")


class TestMeasurementOverhead:
    def test_single_qubit_special_cases(self):
        assert c.measurement_overhead("Z") == 2
        assert c.measurement_overhead("X") == 3
        assert c.measurement_overhead("Y") == 8

    def test_general_formula(self):
        # wx=2, wz=2: ceil(3) + ceil(4.5) + 1 = 3 + 5 + 1
        assert c.measurement_overhead("XXZZ") == 9


class TestPPM:
    def test_weight_two_pure(self):
        assert vb(c.ppm_cost("ZZ")) == 2
        assert vb(c.ppm_cost("XX")) == 2

    def test_weight_one_free(self):
        assert vb(c.ppm_cost("Z")) == 0
        assert c.ppm_cost("Z").reaction_depth == 0

    def test_weight_four_pure(self):
        assert vb(c.ppm_cost("ZZZZ")) == 6

    def test_mixed(self):
        assert vb(c.ppm_cost("XXZZ")) == 7
        assert vb(c.ppm_cost("XZ")) == 5

    def test_matches_built_networks(self):
        for w in range(3, 41):
            net = bn.build_zmeas_network(w)
            assert c.ppm_cost("Z" * w).volume == bn.network_volume(net)

    def test_mixed_matches_built_networks(self):
        for pauli in ("ZX", "XXZ", "XZZX", "ZZXX"):
            net = bn.build_ppm_network(pauli)
            assert c.ppm_cost(pauli).volume == bn.network_volume(net)

    def test_odd_y_records_catalyst_demand(self):
        assert c.ppm_cost("XZY").resource_demand.get("Y") == 1


class TestRotations:
    def test_pi8_single_qubit_default(self):
        s = c.ppr_pi8_cost("Z")
        assert vb(s) == F(57, 2)  # 3.5 + 25
        assert s.reaction_depth == 1

    @pytest.mark.parametrize("constants", CONST_PAIRS)
    def test_pi8_symbolic(self, constants):
        s = c.ppr_pi8_cost("XXZZ", constants)
        assert vb(s) == 9 + F(3, 2) + constants.t_blocks
        assert s.reaction_depth == 0

    def test_pi16_single_qubit_default(self):
        s = c.ppr_pi16_cost("Z")
        assert vb(s) == F(239, 4)  # 17.25 + 17.5 + 25
        assert s.reaction_depth == F(3, 2)

    @pytest.mark.parametrize("constants", CONST_PAIRS)
    def test_pi16_symbolic(self, constants):
        s = c.ppr_pi16_cost("XZ", constants)
        cm = c.measurement_overhead("XZ")
        assert vb(s) == cm + F(61, 4) + F(1, 2) * constants.ccz_blocks + constants.t_blocks

    @pytest.mark.parametrize("constants", CONST_PAIRS)
    def test_variant1_symbolic(self, constants):
        b = 20
        s = c.ppr_variant1_cost("Z", 2.0**-b, constants)
        assert vb(s) == 2 + 3 * b * (4 + constants.t_blocks) + 1
        assert s.reaction_depth == 3 * b

    @pytest.mark.parametrize("constants", CONST_PAIRS)
    def test_variant2_symbolic(self, constants):
        b = 30
        s = c.ppr_variant2_cost("Z", b, constants)
        assert vb(s) == 2 + (b - 1) * (F(45, 2) + constants.ccz_blocks) - F(7, 2)
        assert s.reaction_depth == 2 * b - 3

    @pytest.mark.parametrize("constants", CONST_PAIRS)
    def test_variant3_symbolic(self, constants):
        b = 30
        s = c.ppr_variant3_cost("Z", b, constants)
        assert vb(s) == 2 + F(b, 40) * (305 + 6 * constants.ccz_blocks + 24 * constants.t_blocks)
        assert s.reaction_depth == F(3, 4) * b

    def test_variant3_default_example(self):
        s = c.ppr_variant3_cost("Z", 30)
        assert vb(s) == 2 + F("836.25")
        assert s.reaction_depth == F("22.5")


class TestElementary:
    def test_fixed_volumes(self):
        assert vb(c.hadamard()) == 3
        assert vb(c.cnot()) == 4
        assert vb(c.reactive_cz()) == 5

    def test_depths(self):
        assert c.hadamard().reaction_depth == 0
        assert c.cnot().reaction_depth == 0
        assert c.reactive_cz().reaction_depth == 1
        assert c.toffoli().reaction_depth == 1

    @pytest.mark.parametrize("constants", CONST_PAIRS)
    def test_ccz_consumers_symbolic(self, constants):
        assert vb(c.toffoli(constants)) == 12 + constants.ccz_blocks
        assert vb(c.temporary_and_pair(constants)) == 12 + constants.ccz_blocks
        assert vb(c.controlled_swap(constants)) == 20 + constants.ccz_blocks

    def test_toffoli_default(self):
        assert vb(c.toffoli()) == 47

    def test_network_consistency(self):
        # network volumes equal the formula minus the resource-state volume
        assert bn.network_volume(bn.build_cnot()) == c.cnot().volume
        assert bn.network_volume(bn.build_hadamard()) == c.hadamard().volume
        assert bn.network_volume(bn.build_reactive_cz()) == c.reactive_cz().volume
        zero = c.CostConstants(c_t=F(0), c_ccz=F(0))
        assert bn.network_volume(bn.build_toffoli_consumption()) == c.toffoli(zero).volume


class TestArithmetic:
    @pytest.mark.parametrize("constants", CONST_PAIRS)
    @pytest.mark.parametrize("n", [2, 3, 7, 64])
    def test_adder_symbolic(self, n, constants):
        s = c.gidney_adder(n, constants)
        assert vb(s) == (n - 1) * (22 + constants.ccz_blocks) - 3
        assert s.reaction_depth == 2 * n - 3
        assert s.resource_demand["CCZ"] == n - 1

    def test_adder_2048_default(self):
        assert vb(c.gidney_adder(2048)) == 116676

    def test_adder_segments(self):
        s = c.gidney_adder(5)
        assert [vb(x) for x in s.segments] == [50, 57, 57, 57, 4]
        assert sum(x.volume for x in s.segments) == s.volume
        assert sum(x.reaction_depth for x in s.segments) == s.reaction_depth

    @pytest.mark.parametrize("constants", CONST_PAIRS)
    def test_controlled_adder_symbolic(self, constants):
        n = 12
        s = c.controlled_adder(n, constants)
        cc = constants.ccz_blocks
        assert vb(s) == (n - 1) * (30 + 2 * cc) + 9 + cc
        assert s.reaction_depth == 4 * n - 3

    @pytest.mark.parametrize("constants", CONST_PAIRS)
    def test_out_of_place_adder(self, constants):
        s = c.out_of_place_adder(constants)
        assert [vb(x) for x in s.segments] == [21 + constants.ccz_blocks, 18]
        assert vb(s) == 39 + constants.ccz_blocks

    @pytest.mark.parametrize("constants", CONST_PAIRS)
    def test_qft_symbolic(self, constants):
        n = 9
        s = c.qft(n, constants)
        assert vb(s) == (n * n - 1) * (15 + constants.ccz_blocks) - 3 * n + 1
        assert s.reaction_depth == 2 * n * n - n - 1

    def test_qft_3_default(self):
        assert vb(c.qft(3)) == 392

    def test_preconditions(self):
        for fn in (c.gidney_adder, c.controlled_adder, c.qft):
            with pytest.raises(ValueError):
                fn(1)


class TestDataLoading:
    def test_select_fig_example(self):
        assert vb(c.select_cost_cm(11, 7)) == 550

    @pytest.mark.parametrize("constants", CONST_PAIRS)
    def test_select_symbolic(self, constants):
        n = 20
        w = WeightPair(1, 2)
        cm = 2 + 5 + 1  # ceil(1.5*1) + ceil(1.5*3) + 1
        s = c.select_cost(n, w, constants)
        assert vb(s) == (n - 1) * (13 + cm + constants.ccz_blocks)
        assert s.reaction_depth == n - 1

    def test_qrom_appendix_numbers(self):
        assert vb(c.qrom_cost(1024, 2048)) == 1622478

    def test_qrom_small(self):
        assert vb(c.qrom_cost(4, 4, 1)) == 159

    @pytest.mark.parametrize("constants", CONST_PAIRS)
    def test_qrom_batched_symbolic(self, constants):
        n, b, lam = 64, 8, 4
        s = c.qrom_cost(n, b, lam, constants)
        cc = constants.ccz_blocks
        want = (F(n, lam) - 1) * (15 + F(3, 4) * b * lam + cc) + b * (lam - 1) * (20 + cc)
        assert vb(s) == want
        assert s.reaction_depth == F(n, lam) + math.log2(lam)

    def test_qrom_batch_must_divide(self):
        with pytest.raises(ValueError):
            c.qrom_cost(10, 4, 3)


class TestCommutingPPRs:
    def test_example(self):
        # C_m = 4 from (w_x, w_z) = (0, 1)
        s = c.commuting_pprs_cost(16, WeightPair(0, 1), 30)
        want = 16 * 78 + 4 * c.DEFAULT.rotation_volume(30) / 4
        assert vb(s) == want

    def test_degenerate_single(self):
        s = c.commuting_pprs_cost(1, WeightPair(0, 1), 30)
        assert vb(s) == 78 + c.DEFAULT.rotation_volume(30) / 4
        assert s.reaction_depth == 2 + F("22.5")


class TestCustomSubroutines:
    def test_clifford(self):
        assert vb(c.custom_clifford_cost(10)) == 300
        assert c.custom_clifford_cost(10).reaction_depth == 0

    def test_unitary_reduces_to_clifford(self):
        assert c.custom_unitary_cost(10, 0, 30).volume == c.custom_clifford_cost(10).volume

    def test_unitary_example(self):
        s = c.custom_unitary_cost(100, 10, 30)
        assert vb(s) == 30000 + 10 * (150 + c.DEFAULT.rotation_volume(30) / 4)


class TestCatalysts:
    def test_y_batch(self):
        assert vb(c.y_state_batch(10)) == 31
        assert vb(c.y_state_clone()) == 3

    def test_sqrt_t_pair_default(self):
        assert vb(c.sqrt_t_pair()) == F("85.5")

    def test_ccz_to_2t(self):
        s = c.ccz_to_2t()
        assert vb(s) == F("16.5")
        assert s.reaction_depth == 1


class TestProperties:
    def test_monotone_in_n(self):
        for fn in (c.gidney_adder, c.controlled_adder, c.qft):
            vols = [fn(n).volume for n in range(2, 30)]
            assert vols == sorted(vols)

    def test_monotone_in_b(self):
        vols = [c.ppr_variant3_cost("Z", b).volume for b in range(1, 40)]
        assert vols == sorted(vols)
        vols = [c.ppr_variant2_cost("Z", b).volume for b in range(2, 40)]
        assert vols == sorted(vols)

    def test_ppm_monotone_in_weight(self):
        vols = [c.ppm_cost("Z" * w).volume for w in range(2, 40)]
        assert vols == sorted(vols)

    def test_volume_always_nonnegative_fraction(self):
        for s in (c.toffoli(), c.ppm_cost("XZ"), c.gidney_adder(5)):
            assert isinstance(s.volume, F)
            assert s.volume >= 0

    def test_segment_sum_invariant_enforced(self):
        with pytest.raises(ValueError):
            c.CostSummary(
                volume=F(10),
                reaction_depth=F(0),
                segments=(c.CostSummary(F(4), F(0)),),
            )
