#include <iostream>
int main() { std::cout << "soatk placeholder\n"; return 0; }
