# Otimizador numérico de distorção e experimento de crescimento
