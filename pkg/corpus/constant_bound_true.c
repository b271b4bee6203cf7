/* constant-bound loop: fully unrolled at k = 10 */
int main() {
  unsigned int i = 0;
  unsigned int s = 0;
  while (i < 10) {
    s = s + 1;
    i = i + 1;
  }
  assert(s == 10);
}
