"""
Módulo utilitário com funções comuns utilizadas no projeto.
"""

import math
from fractions import Fraction

from mod_vdbedt.exceptions import ConfigurationError


def exact_ceiling_ratio(numerator: float, denominator: float) -> int:
    """Teto exato de ``numerator / denominator`` sobre os valores decimais digitados.

    Conta em racionais sobre o shortest-repr de cada float: ``2.0 / 0.2`` dá 10.

    Raises:
        ConfigurationError: Se algum valor não for finito ou o denominador
            não for positivo.
    """
    if not (math.isfinite(numerator) and math.isfinite(denominator)) or denominator <= 0:
        raise ConfigurationError(
            "Ratio operands must be finite with a positive denominator. "
            f"Received: {numerator} / {denominator}."
        )
    ratio = Fraction(repr(float(numerator))) / Fraction(repr(float(denominator)))
    return int(math.ceil(ratio))


def meters_to_cells(distance_m: float, resolution: float) -> int:
    """Converte uma distância em metros para células: ``ceil(d / resolução)``.

    Args:
        distance_m (float): Distância em metros (>= 0).
        resolution (float): Tamanho da célula em metros (> 0).

    Returns:
        int: Número de células.
    """
    if distance_m < 0:
        raise ConfigurationError(f"distance_m must be >= 0. Received: {distance_m}.")
    return exact_ceiling_ratio(distance_m, resolution)
