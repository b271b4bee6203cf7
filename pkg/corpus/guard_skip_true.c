/* variable written only on some iterations stays below the bound */
int main() {
  unsigned int n = nondet_uint();
  assume(n <= 4);
  unsigned int i = 0;
  unsigned int odd = 0;
  while (i < n) {
    if (i % 2 == 1) {
      odd = odd + 1;
    }
    i = i + 1;
  }
  assert(odd <= n);
}
