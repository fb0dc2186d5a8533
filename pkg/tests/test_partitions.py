from fractions import Fraction
from itertools import product

import pytest

from fibertop.errors import (
    CoherenceViolated,
    Condition2Violated,
    DepthExceeded,
    InvalidPartition,
    LevelNotRegular,
    NeighborhoodNotNested,
    NotCovering,
    NotDisjoint,
    PartitionError,
    PrefixNotClosed,
)
from fibertop.census import canonical_spaces
from fibertop.normality import build_binary_partitions
from fibertop.oscillation import is_f_continuous_at, osc_on_set
from fibertop.partitions import (
    ConsistentBinaryFamily,
    Level,
    assemble_limit,
    interiors_cover_check,
    stepwise_function,
    validate_consistent_family,
    validate_regular_partition,
)
from fibertop.spaces import constant_map, discrete, identity_map


def all_ordered_partitions(space, k):
    """Every assignment of the points into k ordered (possibly empty) blocks."""
    for assign in product(range(k), repeat=space.n):
        blocks = [0] * k
        for x, b in enumerate(assign):
            blocks[b] |= 1 << x
        yield tuple(blocks)


class TestRegularPartition:
    def test_sierpinski_two_blocks(self, S):
        part = validate_regular_partition(S, S.full, (0b10, 0b01))
        assert part.k == 2

    def test_chain_condition2_violation(self, C3):
        with pytest.raises(Condition2Violated) as err:
            validate_regular_partition(C3, C3.full, (0b100, 0b010, 0b001))
        assert err.value.p == 0

    def test_discrete_singletons(self, D3):
        validate_regular_partition(D3, D3.full, (0b001, 0b010, 0b100))

    def test_prefix_not_closed(self, S):
        with pytest.raises(PrefixNotClosed) as err:
            validate_regular_partition(S, S.full, (0b01, 0b10))
        assert err.value.p == 0

    def test_disjoint_and_covering(self, D2):
        with pytest.raises(NotDisjoint):
            validate_regular_partition(D2, D2.full, (0b11, 0b01))
        with pytest.raises(NotCovering):
            validate_regular_partition(D2, D2.full, (0b01, 0))


class TestInteriorsCover:
    def test_discrete_three(self, D3):
        part = validate_regular_partition(D3, D3.full, (0b001, 0b010, 0b100))
        assert interiors_cover_check(part)

    def test_k2_rejected(self, S):
        part = validate_regular_partition(S, S.full, (0b10, 0b01))
        with pytest.raises(InvalidPartition):
            interiors_cover_check(part)

    def test_exhaustive_small(self):
        # the covering statement holds for every valid regular partition
        found = 0
        for n in range(1, 4):
            for space in canonical_spaces(n):
                for k in (3, 4):
                    for blocks in all_ordered_partitions(space, k):
                        try:
                            part = validate_regular_partition(space, space.full, blocks)
                        except PartitionError:
                            continue
                        found += 1
                        assert interiors_cover_check(part)
        assert found > 50


class TestConsistentFamily:
    def test_depth_zero(self, S):
        fam = ConsistentBinaryFamily(identity_map(S), 0, (Level(S.full, (S.full,)),))
        validate_consistent_family(fam)

    def test_depth_one_sierpinski(self, S):
        f = identity_map(S)
        fam = ConsistentBinaryFamily(f, 0, (
            Level(S.full, (S.full,)),
            Level(0b01, (0, 0b01)),
        ))
        validate_consistent_family(fam)

    def test_role_swapped_blocks_still_structurally_valid(self, S):
        f = identity_map(S)
        fam = ConsistentBinaryFamily(f, 0, (
            Level(S.full, (S.full,)),
            Level(0b01, (0b01, 0)),
        ))
        validate_consistent_family(fam)

    def test_nesting_violation(self, D2):
        f = identity_map(D2)
        fam = ConsistentBinaryFamily(f, 0, (
            Level(D2.full, (D2.full,)),
            Level(0b01, (0b01, 0)),
            Level(0b11, (0b11, 0, 0, 0)),
        ))
        with pytest.raises(NeighborhoodNotNested):
            validate_consistent_family(fam)

    def test_coherence_violation(self, D2):
        f = identity_map(D2)
        fam = ConsistentBinaryFamily(f, 0, (
            Level(D2.full, (D2.full,)),
            Level(D2.full, (0b01, 0b10)),
            Level(D2.full, (0b10, 0, 0, 0b01)),
        ))
        with pytest.raises(CoherenceViolated):
            validate_consistent_family(fam)

    def test_irregular_level(self, C3):
        f = identity_map(C3)
        fam = ConsistentBinaryFamily(f, 0, (
            Level(C3.full, (C3.full,)),
            Level(C3.full, (0b011, 0b100)),
        ))
        with pytest.raises(LevelNotRegular):
            validate_consistent_family(fam)


class TestStepwise:
    def build_d2_family(self, depth=3):
        f = constant_map(discrete(2))
        return build_binary_partitions(f, 0b01, 0b10, 0, depth)

    def test_level_one_is_indicator(self):
        fam = self.build_d2_family()
        phi = stepwise_function(fam, 1)
        assert phi.values == (Fraction(0), Fraction(1))

    def test_level_two_value_grid(self):
        fam = self.build_d2_family()
        phi = stepwise_function(fam, 2)
        denom_ok = all(v in (Fraction(0), Fraction(1, 3), Fraction(2, 3), Fraction(1))
                       for v in phi.values)
        assert denom_ok

    def test_all_levels_pin_f_and_t(self):
        fam = self.build_d2_family(4)
        for n in range(1, 5):
            phi = stepwise_function(fam, n)
            assert phi.values[0] == 0 and phi.values[1] == 1

    def test_level_zero_and_depth_errors(self):
        fam = self.build_d2_family()
        assert set(stepwise_function(fam, 0).values) == {Fraction(0)}
        with pytest.raises(DepthExceeded):
            stepwise_function(fam, 9)


class TestAssembleLimit:
    def test_d2_exact(self):
        f = constant_map(discrete(2))
        fam = build_binary_partitions(f, 0b01, 0b10, 0, 3)
        lim = assemble_limit(fam)
        assert lim.phi.values == (Fraction(0), Fraction(1))
        assert lim.error_bound == Fraction(1, 7)
        assert lim.stabilized and lim.exact_phi is not None
        assert lim.exact_phi.values == (Fraction(0), Fraction(1))

    def test_depth_one_error_bound(self):
        f = constant_map(discrete(2))
        fam = build_binary_partitions(f, 0b01, 0b10, 0, 1)
        lim = assemble_limit(fam)
        assert lim.error_bound == 1

    def test_depth_five_osc_bound(self):
        f = constant_map(discrete(3))
        fam = build_binary_partitions(f, 0b001, 0b110, 0, 5)
        lim = assemble_limit(fam)
        region = fam.carrier(5)
        assert osc_on_set(lim.phi, region) <= Fraction(1, 31)

    def test_exact_limit_is_f_continuous_when_stabilized(self):
        # census of builder families: wherever stabilization is detected the
        # extrapolated limit has exactly zero oscillation at the base point
        checked = 0
        for n in range(1, 4):
            for space in canonical_spaces(n):
                f = constant_map(space)
                closed = sorted(space.full ^ o for o in space.opens)
                for a in closed:
                    for b in closed:
                        if a & b:
                            continue
                        try:
                            fam = build_binary_partitions(f, a, b, 0, 4)
                        except Exception:
                            continue
                        lim = assemble_limit(fam)
                        if lim.stabilized and lim.exact_phi is not None:
                            checked += 1
                            assert is_f_continuous_at(f, lim.exact_phi, 0).holds
        assert checked > 20
