#include <iostream>
int main() { std::cout << "skolem cli stub\n"; }
