"""
Transformada de distância euclidiana incremental e truncada (registros de
célula, ondas de rebaixamento/elevação e modo de transformada global).
"""
