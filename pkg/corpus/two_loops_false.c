/* sequential loops: both counters agree, so the claim fails at n == 0 */
int main() {
  unsigned int n = nondet_uint();
  assume(n <= 5);
  unsigned int i = 0;
  unsigned int a = 0;
  unsigned int b = 0;
  while (i < n) {
    a = a + 1;
    i = i + 1;
  }
  i = 0;
  while (i < n) {
    b = b + 1;
    i = i + 1;
  }
  assert(a == b + 1);
}
