namespace griddyn {}
