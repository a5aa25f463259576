"""Testes do mod_vdbedt."""
