"""
Formatos de arquivo de cenário/mapa, geração determinística de cenários e
exportação de fatias do campo.
"""
