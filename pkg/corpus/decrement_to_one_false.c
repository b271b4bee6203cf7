/* countdown ends at zero, not one; x == 0 skips the loop entirely */
int main() {
  unsigned int x = *;
  while (x > 0) x--;
  assert(x == 1);
}
