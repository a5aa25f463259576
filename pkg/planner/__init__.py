"""
Planejador de demonstração sobre o campo de distâncias.
"""
