/* non-affine accumulator: only full unrolling proves the result */
int main() {
  long long int p = 1;
  int i = 0;
  while (i < 3) {
    p = p * 2;
    i = i + 1;
  }
  assert(p == 8);
}
