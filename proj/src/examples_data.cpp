namespace pml {}
