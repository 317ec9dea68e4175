# Sistemas quase biortogonais (exatos, perturbados e por níveis)
