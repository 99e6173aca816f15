# Tests package for the CHoS simulator
