"""
Fila de prioridade que agenda as frentes das ondas de transformada.
"""
