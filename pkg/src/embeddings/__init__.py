# Construções de mergulhos de árvores em espaços de coordenadas
