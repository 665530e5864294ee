#include "walkport/walkport.hpp"
int main() { return 0; }
