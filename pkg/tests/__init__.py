# Echo extraction tests
