"""
Hierarquia de erros do laboratório.

Cada classe carrega o código de saída usado pela CLI:
  ConfigError         2  parâmetros ou especificações inválidos
  InvariantViolation  3  invariante de sistema ou cota de construção violada
  CapacityExhausted   4  ramificação finita ou orçamento insuficiente
"""


class LabError(Exception):
    exit_code = 1


class ConfigError(LabError, ValueError):
    exit_code = 2


class InvariantViolation(LabError):
    exit_code = 3


class CapacityExhausted(LabError):
    exit_code = 4
