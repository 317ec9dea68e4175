# Árvores hiperbólicas finitas e métrica ρ
