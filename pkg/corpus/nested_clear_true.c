/* nested loops writing a quadratic count */
int main() {
  unsigned int m = nondet_uint();
  assume(m <= 3);
  unsigned int i = 0;
  unsigned int j;
  unsigned int s = 0;
  while (i < m) {
    j = 0;
    while (j < m) {
      s = s + 1;
      j = j + 1;
    }
    i = i + 1;
  }
  assert(s == m*m);
}
