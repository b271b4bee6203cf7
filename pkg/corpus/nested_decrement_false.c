/* triangular count overflows the claimed bound at x == 3 */
int main() {
  unsigned int x = nondet_uint();
  assume(x <= 3);
  unsigned int y;
  unsigned int t = 0;
  while (x > 0) {
    y = x;
    while (y > 0) {
      y = y - 1;
      t = t + 1;
    }
    x = x - 1;
  }
  assert(t <= 5);
}
