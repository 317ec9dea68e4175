# Linha de comando: execuções reprodutíveis com manifesto
