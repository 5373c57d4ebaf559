int fibNumber(int n)
{
    int a = 0;
    int b = 1;
    while (n > 0) {
        int sum = a + b;
        a = b;
        b = sum;
        n--;
    }
    return a;
}
