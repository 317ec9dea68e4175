# Laboratório de mergulhos de árvores hiperbólicas
__version__ = "0.1.0"
