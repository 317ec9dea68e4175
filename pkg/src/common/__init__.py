# Utilidades comuns: log, configuração e erros
