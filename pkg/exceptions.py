"""
Módulo para definições de exceções customizadas.

Duas famílias, como no resto do projeto: ``InputValidationError`` para
entradas inválidas (configuração, coordenadas, arquivos) e
``CalculationError`` para falhas durante um cálculo (estado da grade,
limites de recurso, invariantes quebradas, ausência de caminho).
"""


class CalculationError(Exception):
    """Exceção levantada quando ocorre um erro durante um cálculo."""
    pass


class InputValidationError(Exception):
    """Exceção levantada quando os parâmetros de entrada são inválidos."""
    pass


class ConfigurationError(InputValidationError):
    """Configuração inválida (TreeConfig, dmax, GeneratorSpec, PathQuery)."""
    pass


class DomainError(InputValidationError):
    """Coordenada fora do domínio empacotável da árvore (±2**30 por eixo)."""
    pass


class ScenarioParseError(InputValidationError):
    """Arquivo de cenário malformado; ``line`` aponta a linha (base 1)."""

    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class ScenarioValidationError(InputValidationError):
    """Cenário bem formado mas inconsistente (coordenada fora da região etc.)."""
    pass


class GridStateError(CalculationError):
    """Operação incompatível com o estado atual da grade."""
    pass


class ResourceLimitError(CalculationError):
    """Região grande demais para o oráculo de força bruta."""
    pass


class InvariantViolationError(CalculationError):
    """Inconsistência interna detectada durante a propagação das ondas."""
    pass


class NoPathError(CalculationError):
    """O objetivo não é alcançável a partir da origem pelas células livres."""
    pass
