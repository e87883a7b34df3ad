C = 299_792_458.0  # m/s
RAMAN_EDGE_HZ = 32e12
