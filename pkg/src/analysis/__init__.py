# Medição de distorção, módulos grosseiros, filtração e concentração
