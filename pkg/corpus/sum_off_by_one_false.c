/* off-by-one variant of the running sum: falsified in the first unwinding */
int main(int argc, char **argv) {
  long long int i = 1, sn = 0;
  long long int a = 2;
  unsigned int n;
  n = nondet_uint();
  assume(n >= 1);
  while (i <= n) {
    sn = sn + a;
    i++;
  }
  assert(sn == n*a + 1);
}
