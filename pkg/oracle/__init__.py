"""
Oráculo de força bruta da transformada truncada, usado como verdade.
"""
