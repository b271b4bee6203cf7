/* loop-free: unsigned subtraction wraps to the type maximum */
int main() {
  unsigned int x = 0;
  x = x - 1;
  assert(x == 0);
}
