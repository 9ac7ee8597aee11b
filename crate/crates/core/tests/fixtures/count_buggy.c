#include <stdio.h>
int main() {
    int k, x, a = 1, b = 0, c = 0;
    scanf("%d", &k);
    for (int i = 0; i < k; i++) {
        scanf("%d", &x);
        if (x == 2)
            a++;
        if (x == 5)
            b++;
        if (x == 11)
            c++;
    }
    printf("%d\n%d\n%d\n", a, c, b);
    return 0;
}
