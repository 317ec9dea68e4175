# Testes do laboratório de árvores hiperbólicas
