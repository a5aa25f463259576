"""
Motor de benchmark: reprodução de cenários, verificação contra o oráculo e
ablações.
"""
