import pytest
from sympy.polys.domains import QQ

from polydyn.core.rings import (
    PARAM,
    QQ_RING,
    T,
    AlgExtRing,
    coefficient_bits,
    format_rational,
    param_coefficients,
    parse_rational,
    rational_root,
)
from polydyn.errors import NotInvertibleError, ParseError, RingMismatchError


class TestRationals:
    def test_parse_and_format(self):
        assert parse_rational("-3/4") == QQ(-3, 4)
        assert parse_rational(" 7 ") == QQ(7)
        assert format_rational(QQ(6, -8)) == "-3/4"
        assert format_rational(QQ(5)) == "5"

    @pytest.mark.parametrize("text", ["1/0", "x", "1.5", ""])
    def test_parse_rejects_malformed(self, text):
        with pytest.raises(ParseError):
            parse_rational(text)

    def test_rational_root(self):
        assert rational_root(QQ(8, 27), 3) == QQ(2, 3)
        assert rational_root(QQ(-8), 3) == QQ(-2)
        assert rational_root(QQ(2), 2) is None
        assert rational_root(QQ(-4), 2) is None

    def test_zero_has_no_inverse(self):
        with pytest.raises(NotInvertibleError):
            QQ_RING.inverse(0)

    def test_parameter_element_is_not_rational(self):
        with pytest.raises(RingMismatchError):
            QQ_RING.convert(T)

    def test_coefficient_bits(self):
        assert coefficient_bits(QQ(3, 4)) == 2 + 3


class TestParameterRing:
    def test_parse_and_format(self):
        value = PARAM.parse("[1, 0, 2]")
        assert value == 1 + 2 * T**2
        assert PARAM.format(value) == "[1, 0, 2]"
        assert param_coefficients(value) == [QQ(1), QQ(0), QQ(2)]

    def test_bare_rational_is_constant(self):
        assert PARAM.parse("-1/2") == PARAM.convert(QQ(-1, 2))

    def test_only_constants_are_units(self):
        assert PARAM.inverse(PARAM.convert(2)) == PARAM.convert(QQ(1, 2))
        with pytest.raises(NotInvertibleError):
            PARAM.inverse(T)

    def test_embeds_rationals(self):
        assert PARAM.embeds(QQ_RING)
        assert not QQ_RING.embeds(PARAM)


class TestExtension:
    def test_generator_satisfies_relation(self):
        ext = AlgExtRing(2, 2)
        alpha = ext.generator
        assert alpha * alpha == ext.scalar(2)

    def test_inverse_of_binomial(self):
        ext = AlgExtRing(2, 2)
        value = ext.one + ext.generator
        assert value * ext.inverse(value) == ext.one

    def test_inverse_of_monomial(self):
        ext = AlgExtRing(3, QQ(5))
        alpha = ext.generator
        assert alpha * ext.inverse(alpha) == ext.one

    def test_elements_of_other_extensions_are_rejected(self):
        with pytest.raises(RingMismatchError):
            AlgExtRing(2, 2).convert(AlgExtRing(2, 3).generator)

    def test_nested_extensions_are_rejected(self):
        with pytest.raises(RingMismatchError):
            AlgExtRing(2, 2, AlgExtRing(2, 3))

    def test_format(self):
        ext = AlgExtRing(2, 3)
        assert ext.format(ext.generator * 2 + 1) == "1 + (2)*alpha"
