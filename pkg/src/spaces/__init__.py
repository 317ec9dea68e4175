# Espaços de sequências: normas, projeções e módulos assintóticos
