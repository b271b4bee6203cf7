/* stepping down by two lands on 0 or 1 */
int main() {
  unsigned int x = *;
  while (x >= 2) {
    x = x - 2;
  }
  assert(x <= 1);
}
