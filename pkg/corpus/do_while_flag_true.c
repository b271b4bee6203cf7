/* the body runs at least once, so the flag is always set on exit */
int main() {
  unsigned int x = nondet_uint();
  assume(x >= 1);
  unsigned int c = 0;
  do {
    x = x - 1;
    c = 1;
  } while (x > 0);
  assert(c == 1 && x == 0);
}
