"""
Grade esparsa hierárquica no estilo VDB (tabela hash na raiz, níveis
internos e folhas) com cache de acesso por nível.
"""
