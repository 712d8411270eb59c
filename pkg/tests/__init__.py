# Tests package for the peer-review simulator
